#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "levelagg/kde.hpp"
#include "levelagg/neighborhood.hpp"
#include "levelagg/points.hpp"
#include "levelagg/rng.hpp"

namespace levelagg {

enum class Variant { Counting, Smoothed, EtaCounting, EtaSmoothed };

Variant parse_variant(const std::string& name);
const char* variant_name(Variant v);

struct AggregateParams {
  double epsilon = 0.0;
  Variant variant = Variant::Counting;
  KernelKind smooth_kernel = KernelKind::Indicator;
  double eta = 0.0;
};

//! Neighborhood volume estimate vanished while the membership count did not,
//! so the density ratio is undefined at this query point.
class DegenerateVolumeError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

//! Every candidate epsilon degenerated on at least half the evaluation points.
class SelectionFailedError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

//! Volume of the neighborhood, supplied externally as a function of
//! (query point, epsilon).
using ExactVolumeFn = std::function<double(std::span<const double>, double)>;

//! Density estimate at x: fraction of the held-out sample falling in the
//! estimated level-set neighborhood of x, divided by the neighborhood's
//! volume. Bank values at the held-out sample and at the volume draws are
//! precomputed once; queries only evaluate the bank at x.
class AggregatedEstimator {
public:
  //! Hit-or-miss volume over externally generated draws (shared across
  //! estimators so volume comparisons see identical draws).
  AggregatedEstimator(std::vector<DensityFn> bank, const PointMatrix& eval_sample,
                      AggregateParams params, BoundingBox mc_box, const PointMatrix& draws);

  //! Hit-or-miss volume over n_mc draws from the stream.
  AggregatedEstimator(std::vector<DensityFn> bank, const PointMatrix& eval_sample,
                      AggregateParams params, BoundingBox mc_box, std::size_t n_mc,
                      RngStream volume_stream);

  //! Exact volume supplied per query; no draws involved.
  AggregatedEstimator(std::vector<DensityFn> bank, const PointMatrix& eval_sample,
                      AggregateParams params, ExactVolumeFn exact_volume);

  //! Full estimate at x; throws DegenerateVolumeError when the volume
  //! estimate is zero but the membership fraction is not.
  double eval(std::span<const double> x) const;

  //! Held-out membership fraction at the configured epsilon (counting form).
  double count_fraction(std::span<const double> x) const;

  //! Smoothed membership weight at the configured epsilon.
  double smooth_fraction(std::span<const double> x) const;

  //! Neighborhood volume estimate at the configured epsilon.
  double neighborhood_volume(std::span<const double> x) const;

  //! Bank densities evaluated at x, the per-query inputs of eval_grid.
  std::vector<double> bank_values(std::span<const double> x) const;

  //! Estimates across an epsilon grid sharing one set of bank values.
  //! out_value and out_degenerate hold eps_grid.size() entries; degenerate
  //! entries report value 0 and flag 1. Volume draws mode only.
  void eval_grid(std::span<const double> centers, std::span<const double> eps_grid,
                 double* out_value, unsigned char* out_degenerate) const;

  const AggregateParams& params() const { return params_; }
  std::size_t bank_size() const { return bank_.size(); }
  std::size_t eval_sample_size() const { return l_; }
  std::size_t volume_draw_count() const { return n_mc_; }
  bool exact_volume_mode() const { return static_cast<bool>(exact_volume_); }
  const BoundingBox& mc_box() const;

private:
  void init_tables(const PointMatrix& eval_sample, const PointMatrix* draws);
  void numerator_grid(std::span<const double> centers, std::span<const double> eps_grid,
                      double* out_fraction) const;
  void volume_grid(std::span<const double> centers, std::span<const double> eps_grid,
                   double* out_volume) const;

  std::vector<DensityFn> bank_;
  AggregateParams params_;
  std::size_t dim_ = 0;
  std::size_t l_ = 0;
  std::vector<std::vector<double>> v_;  // bank x eval_sample
  BoundingBox box_;
  std::size_t n_mc_ = 0;
  std::vector<std::vector<double>> w_;  // bank x draws
  ExactVolumeFn exact_volume_;
};

//! Pointwise mean of the bank densities at pts.
std::vector<double> mean_density(const std::vector<KdeEstimator>& bank, const PointMatrix& pts);

//! Log-spaced epsilon grid proportional to the interquartile range of the
//! reference density values.
std::vector<double> default_eps_grid(std::span<const double> reference, std::size_t size = 20,
                                     double lo_frac = 1e-2, double hi_frac = 1.0);

struct EpsilonSelection {
  double epsilon = 0.0;
  std::size_t index = 0;
  std::vector<double> distance;          // per grid value; NaN where disqualified
  std::vector<std::size_t> degenerate;   // per grid value, count of degenerate points
  std::vector<double> values;            // point-major estimates, eval_points x grid
  std::vector<unsigned char> flags;      // point-major degeneracy flags, same layout
};

//! Grid argmin of the discrete L2 distance between the aggregated estimate
//! and the reference values over the eval points; ties resolve to the
//! smallest epsilon. Grid values degenerating on at least half the points
//! are disqualified; if all are, throws SelectionFailedError.
EpsilonSelection select_epsilon(const AggregatedEstimator& est,
                                std::span<const double> reference,
                                const PointMatrix& eval_points, const BoundingBox& eval_box,
                                std::span<const double> eps_grid);

//! Convenience form: reference taken as the mean of whole-sample estimators.
EpsilonSelection select_epsilon(const std::vector<KdeEstimator>& whole_sample_bank,
                                const AggregatedEstimator& est, const PointMatrix& eval_points,
                                const BoundingBox& eval_box, std::span<const double> eps_grid);

}  // namespace levelagg
