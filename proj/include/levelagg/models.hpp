#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "levelagg/kde.hpp"
#include "levelagg/points.hpp"
#include "levelagg/rng.hpp"

namespace levelagg {

//! Product of Beta(alpha, beta) marginals on (0,1)^d.
struct BetaProduct {
  double alpha = 1.5;
  double beta = 1.5;
  std::size_t d = 2;
};

//! Centered normal with independent coordinates and per-coordinate sigma.
struct DiagNormal {
  std::vector<double> sigma;
};

//! Product of Weibull(lambda, k) marginals on (0,inf)^d. pooled_exponent
//! switches the radial power from k-1 per coordinate to d*(k-1), an
//! unnormalized alternative kept for comparison runs.
struct WeibullProduct {
  double lambda = 1.0;
  double k = 1.0;
  std::size_t d = 2;
  bool pooled_exponent = false;
};

//! Half-half mixture of two bivariate normals sharing one covariance,
//! Sigma = [[s1_sq, rho], [rho, s2_sq]].
struct NormalMixtureSharedCov {
  std::array<double, 2> mu1{-1.0, 1.0};
  std::array<double, 2> mu2{1.0, 1.0};
  double s1_sq = 0.5;
  double s2_sq = 0.3;
  double rho = 0.2;
};

//! Half-half mixture with mirrored covariances: the first component uses
//! [[s1_sq, rho], [rho, s2_sq]], the second [[s2_sq, -rho], [-rho, s1_sq]].
struct NormalMixtureTwoCov {
  std::array<double, 2> mu1{-1.0, 1.0};
  std::array<double, 2> mu2{1.0, 1.0};
  double s1_sq = 0.5;
  double s2_sq = 0.3;
  double rho = 0.2;
};

using AnalyticModel = std::variant<BetaProduct, DiagNormal, WeibullProduct,
                                   NormalMixtureSharedCov, NormalMixtureTwoCov>;

void validate(const AnalyticModel& model);
std::size_t model_dim(const AnalyticModel& model);
std::string describe(const AnalyticModel& model);

double model_density(const AnalyticModel& model, std::span<const double> x);
DensityFn model_density_fn(const AnalyticModel& model);

//! n draws, one row per point; consumes the stream in row order.
PointMatrix model_sample(const AnalyticModel& model, std::size_t n, RngStream& stream);

//! Volume of the d-dimensional unit ball.
double unit_ball_volume(std::size_t d);

//! Limit of mu(star neighborhood) / (2 eps) for an isotropic normal:
//! 2 pi^(d/2) ||x||^(d-1) / (Gamma(d/2) ||grad f(x)||).
double spherical_volume_rate(const DiagNormal& model, std::span<const double> x);

//! Exact measure of {y : |f(y) - f(x)| < eps} for an isotropic normal,
//! the spherical shell between the two level radii. Requires eps < f(x).
double spherical_star_volume(const DiagNormal& model, std::span<const double> x, double eps);

//! Fallback evaluation boxes; experiment configs normally pin their own.
BoundingBox default_test_box(const AnalyticModel& model);
BoundingBox default_mc_box(const AnalyticModel& model);

}  // namespace levelagg
