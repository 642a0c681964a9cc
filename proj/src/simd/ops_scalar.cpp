#include <cmath>
#include <cstddef>

#include "levelagg/simd.hpp"

namespace levelagg::simd {

namespace {

double gauss_weight_sum_scalar(const double* const* coords, std::size_t n, std::size_t dim,
                               const double* x, double scale) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double sq = 0.0;
    for (std::size_t c = 0; c < dim; ++c) {
      const double d = x[c] - coords[c][i];
      sq += d * d;
    }
    sum += std::exp(-scale * sq);
  }
  return sum;
}

double epan_prod_sum_scalar(const double* const* coords, std::size_t n, std::size_t dim,
                            const double* x, double inv_h) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double prod = 1.0;
    for (std::size_t c = 0; c < dim; ++c) {
      const double u = (x[c] - coords[c][i]) * inv_h;
      const double t = 1.0 - u * u;
      prod = t > 0.0 ? prod * (0.75 * t) : 0.0;
      if (prod == 0.0) break;
    }
    sum += prod;
  }
  return sum;
}

double box_prod_sum_scalar(const double* const* coords, std::size_t n, std::size_t dim,
                           const double* x, double inv_h) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    bool in = true;
    for (std::size_t c = 0; c < dim; ++c) {
      const double u = (x[c] - coords[c][i]) * inv_h;
      if (!(std::fabs(u) < 1.0)) {
        in = false;
        break;
      }
    }
    if (in) sum += 1.0;
  }
  return sum;
}

void max_abs_dev_scalar(const double* const* rows, std::size_t m, std::size_t n,
                        const double* centers, double* out) {
  for (std::size_t j = 0; j < n; ++j) {
    double mx = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
      const double d = std::fabs(rows[r][j] - centers[r]);
      if (d > mx) mx = d;
    }
    out[j] = mx;
  }
}

std::size_t count_below_scalar(const double* v, std::size_t n, double bound) {
  std::size_t count = 0;
  for (std::size_t j = 0; j < n; ++j)
    if (v[j] < bound) ++count;
  return count;
}

double smooth_prod_sum_scalar(const double* const* rows, std::size_t m, std::size_t n,
                              const double* centers, double eps, bool epan_weight,
                              double min_hits) {
  const double inv_eps = 1.0 / eps;
  double sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double prod = 1.0;
    double hits = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
      const double diff = rows[r][j] - centers[r];
      if (std::fabs(diff) < eps) hits += 1.0;
      if (epan_weight) {
        const double u = diff * inv_eps;
        const double t = 1.0 - u * u;
        prod = t > 0.0 ? prod * t : 0.0;
      } else {
        if (!(std::fabs(diff) < eps)) prod = 0.0;
      }
    }
    if (min_hits > 0.0 && !(hits >= min_hits)) continue;
    sum += prod;
  }
  return sum;
}

double gauss_pair_sum_scalar(const double* const* coords, std::size_t n, std::size_t dim,
                             double scale) {
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double sq = 0.0;
      for (std::size_t c = 0; c < dim; ++c) {
        const double d = coords[c][i] - coords[c][j];
        sq += d * d;
      }
      sum += std::exp(-scale * sq);
    }
  }
  return sum;
}

// autocorrelation of the parabolic kernel on |t|<2
double epan_conv(double t) {
  const double a = std::fabs(t);
  if (!(a < 2.0)) return 0.0;
  const double s = 2.0 - a;
  return (3.0 / 160.0) * s * s * s * (t * t + 6.0 * a + 4.0);
}

void compact_pair_sums_scalar(const double* const* coords, std::size_t n, std::size_t dim,
                              double inv_h, bool epan, double* conv_sum, double* loo_sum) {
  double conv = 0.0, loo = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double pc = 1.0, pk = 1.0;
      for (std::size_t c = 0; c < dim; ++c) {
        const double t = (coords[c][i] - coords[c][j]) * inv_h;
        const double a = std::fabs(t);
        if (epan) {
          pc *= epan_conv(t);
          const double w = 1.0 - t * t;
          pk = w > 0.0 ? pk * (0.75 * w) : 0.0;
        } else {
          pc *= a < 2.0 ? 2.0 - a : 0.0;
          if (!(a < 1.0)) pk = 0.0;
        }
        if (pc == 0.0 && pk == 0.0) break;
      }
      conv += pc;
      loo += pk;
    }
  }
  *conv_sum = conv;
  *loo_sum = loo;
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops table = {
      "scalar",
      gauss_weight_sum_scalar,
      epan_prod_sum_scalar,
      box_prod_sum_scalar,
      max_abs_dev_scalar,
      count_below_scalar,
      smooth_prod_sum_scalar,
      gauss_pair_sum_scalar,
      compact_pair_sums_scalar,
  };
  return table;
}

}  // namespace levelagg::simd
