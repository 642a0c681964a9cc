#pragma once

#include <cstddef>

namespace levelagg::simd {

enum class Backend { Scalar, Avx2 };

//! Data-parallel inner loops shared by the estimators. Every entry has a
//! scalar reference implementation; vector variants may only differ from it
//! by floating-point summation order. Comparison-based entries (box_prod_sum,
//! max_abs_dev, count_below, indicator-weighted smooth_prod_sum) must agree
//! with the reference bit for bit.
struct Ops {
  const char* name;

  //! sum_i exp(-scale * ||x - P_i||^2); coords[c] is column c of n values.
  double (*gauss_weight_sum)(const double* const* coords, std::size_t n, std::size_t dim,
                             const double* x, double scale);

  //! sum_i prod_c 0.75*(1-u^2) with u=(x_c-P_ic)*inv_h, zero outside |u|<1.
  double (*epan_prod_sum)(const double* const* coords, std::size_t n, std::size_t dim,
                          const double* x, double inv_h);

  //! sum_i prod_c 1[|u|<1]; integer-valued.
  double (*box_prod_sum)(const double* const* coords, std::size_t n, std::size_t dim,
                         const double* x, double inv_h);

  //! out[j] = max_m |rows[m][j] - centers[m]|.
  void (*max_abs_dev)(const double* const* rows, std::size_t m, std::size_t n,
                      const double* centers, double* out);

  //! #{ j : v[j] < bound }, strict.
  std::size_t (*count_below)(const double* v, std::size_t n, double bound);

  //! sum_j gate_j * prod_m W((rows[m][j]-centers[m])/eps) where W is the
  //! indicator of |u|<1 (epan_weight false, evaluated as |diff|<eps) or
  //! (1-u^2) on |u|<1 (epan_weight true). gate_j is 1 when
  //! #{m : |rows[m][j]-centers[m]| < eps} >= min_hits, or always 1 when
  //! min_hits <= 0.
  double (*smooth_prod_sum)(const double* const* rows, std::size_t m, std::size_t n,
                            const double* centers, double eps, bool epan_weight,
                            double min_hits);

  //! sum_{i<j} exp(-scale * ||P_i - P_j||^2).
  double (*gauss_pair_sum)(const double* const* coords, std::size_t n, std::size_t dim,
                           double scale);

  //! Pairwise sums for the compact-kernel cross-validation score:
  //! conv_sum = sum_{i<j} prod_c C(t) and loo_sum = sum_{i<j} prod_c K(t)
  //! with t = (P_ic - P_jc) * inv_h, K the kernel and C its autocorrelation.
  //! epan true selects the parabolic kernel, false the unit-window indicator.
  void (*compact_pair_sums)(const double* const* coords, std::size_t n, std::size_t dim,
                            double inv_h, bool epan, double* conv_sum, double* loo_sum);
};

//! Active table; resolved once from the CPU, overridable via the
//! LEVELAGG_SIMD environment variable (scalar | avx2) before first use.
const Ops& ops();

const Ops& scalar_ops();
bool backend_available(Backend b);
Backend active_backend();

//! Force a specific table; throws std::invalid_argument when unsupported.
void force_backend(Backend b);

}  // namespace levelagg::simd
