#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "levelagg/aggregate.hpp"
#include "levelagg/kde.hpp"
#include "levelagg/models.hpp"
#include "levelagg/points.hpp"
#include "levelagg/rng.hpp"
#include "levelagg/stats.hpp"

namespace levelagg {

// Substream tags hung off the master seed. Fixed values: reruns must agree
// across worker counts and releases.
inline constexpr std::uint64_t kReplicateTag = 0x5245504C;
inline constexpr std::uint64_t kTestTag = 0x54455354;
inline constexpr std::uint64_t kVolumeTag = 0x564F4C55;

struct ExperimentConfig {
  AnalyticModel model;
  KernelKind kernel = KernelKind::Gaussian;
  Variant variant = Variant::Counting;
  KernelKind smooth_kernel = KernelKind::Indicator;
  double eta = 0.0;
  std::size_t k = 500;
  std::size_t l = 500;
  std::size_t n_test = 500;
  std::size_t n_mc = 10000;
  std::size_t replicates = 20;
  std::uint64_t seed = 1;
  std::vector<double> multipliers = {0.9, 0.95, 1.0, 1.05, 1.1};
  std::size_t eps_grid_size = 20;
  double eps_lo_frac = 1e-2;
  double eps_hi_frac = 1.0;
  std::optional<BoundingBox> test_box;  // defaults come from the model
  std::optional<BoundingBox> mc_box;
};

struct ReplicateRow {
  double eps = 0.0;        // selected per replicate
  double agg_error = 0.0;  // L2 over the non-degenerate test points
  std::vector<double> fk_errors;  // one per bandwidth multiplier
  std::vector<double> fn_errors;
  std::size_t degenerate = 0;  // test points dropped from agg_error
};

struct ExperimentResult {
  std::vector<ReplicateRow> rows;
  double hcv = 0.0;   // from replicate 1's first-block sample, then frozen
  double hcvu = 0.0;  // from replicate 1's whole sample, then frozen
  BoundingBox test_box;
  BoundingBox mc_box;
  std::vector<double> multipliers;
};

//! Discrete L2 distance sqrt(box_volume / N * sum (est - truth)^2).
double l2_error(std::span<const double> estimate, std::span<const double> truth,
                double box_volume);

//! Replicated run: per replicate draw k+l points, split, build the bandwidth
//! banks, select epsilon against the whole-sample mean density on a fresh
//! uniform test sample, and record L2 errors for the aggregated estimator and
//! every bank member. Volume draws are generated once and shared.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

struct KsResult {
  double statistic = 0.0;
  double p_value = 0.0;
};

//! P(K > t) for the Kolmogorov distribution.
double kolmogorov_tail(double t);

//! One-sample Kolmogorov-Smirnov test against a fully specified normal.
//! Asymptotic p-value; requires at least 20 observations.
KsResult ks_test_normal(std::span<const double> sample, double mu, double sd);

struct CltConfig {
  AnalyticModel model = DiagNormal{{1.0, 1.0}};  // must be an isotropic normal
  std::vector<double> point = {0.5, 0.5};
  double epsilon = 0.005;
  std::size_t k = 2000;
  std::size_t l = 500;
  std::size_t replicates = 300;
  std::size_t n_mc = 20000;  // volume draws, redrawn per replicate
  std::uint64_t seed = 1;
  double curve_bandwidth = 0.15;
  std::optional<BoundingBox> mc_box;  // defaults come from the model
};

struct CltResult {
  std::vector<double> stats;  // sqrt(vol * l) * (estimate - truth), one per replicate
  double fx = 0.0;            // true density at the query point, the target variance
  double star_volume = 0.0;   // exact level-set neighborhood volume
  double hcv = 0.0;
  KsResult ks;  // against N(0, fx)
  SevenNumber summary;
  std::vector<double> curve_x;  // smoothed density of the statistics
  std::vector<double> curve_y;
};

//! Standardized-statistic harness: single-estimator bank (Gaussian kernel,
//! cross-validated bandwidth frozen from replicate 1). The estimate is the
//! usual count/volume ratio; the model's closed-form neighborhood volume
//! enters only through the sqrt(vol * l) standardization. Volume draws are
//! redrawn per replicate so their Monte Carlo error enters each statistic
//! as independent noise instead of one offset shared by every replicate.
CltResult run_clt(const CltConfig& cfg);

}  // namespace levelagg
