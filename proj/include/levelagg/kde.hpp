#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "levelagg/kernels.hpp"
#include "levelagg/points.hpp"

namespace levelagg {

using DensityFn = std::function<double(std::span<const double>)>;

//! Product-kernel density estimator with a single bandwidth shared by all
//! coordinates. Copies are cheap, sample storage is shared.
class KdeEstimator {
public:
  KdeEstimator(PointMatrix sample, double bandwidth, KernelKind kernel);

  double operator()(std::span<const double> x) const;

  //! Evaluates at every query point; out must hold queries.size() values.
  //! Parallel over queries, each value written to its own slot.
  void eval_many(const PointMatrix& queries, double* out) const;

  std::size_t dim() const;
  std::size_t sample_size() const;
  double bandwidth() const { return h_; }
  KernelKind kernel() const { return kernel_; }

  DensityFn as_density() const;

private:
  std::shared_ptr<const PointMatrix> sample_;
  std::vector<const double*> cols_;
  double h_;
  KernelKind kernel_;
};

//! Least-squares cross-validation score: the integral of the squared
//! estimate minus twice the mean leave-one-out density at the sample points.
//! The integral term is exact (kernel autocorrelations), not quadrature.
double lscv_score(const PointMatrix& sample, double h, KernelKind kernel);

//! Normal-reference bandwidth (4/(d+2))^(1/(d+4)) * sigma * n^(-1/(d+4)),
//! sigma the root mean per-coordinate sample variance.
double silverman_reference(const PointMatrix& sample);

//! Log-spaced bandwidth grid around the normal-reference value.
std::vector<double> bandwidth_grid(const PointMatrix& sample, std::size_t size = 30,
                                   double lo_frac = 0.1, double hi_frac = 3.0);

//! Grid argmin of lscv_score; ties resolve to the smaller bandwidth.
double select_bandwidth(const PointMatrix& sample, KernelKind kernel,
                        std::span<const double> grid);

//! One estimator per multiplier, bandwidths multiplier * base.
std::vector<KdeEstimator> build_bank(const PointMatrix& sample, double base,
                                     std::span<const double> multipliers, KernelKind kernel);

}  // namespace levelagg
