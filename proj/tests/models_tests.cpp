#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "levelagg/models.hpp"
#include "support/oracles.hpp"

using namespace levelagg;

namespace {

constexpr double kPi = std::numbers::pi;

// plain transcription of the bivariate normal with an explicit 2x2 inverse
double binormal_direct(const std::array<double, 2>& mu, double a11, double a12, double a22,
                       std::span<const double> x) {
  const double det = a11 * a22 - a12 * a12;
  const double i11 = a22 / det;
  const double i12 = -a12 / det;
  const double i22 = a11 / det;
  const double u = x[0] - mu[0];
  const double v = x[1] - mu[1];
  const double quad = i11 * u * u + 2.0 * i12 * u * v + i22 * v * v;
  return std::exp(-0.5 * quad) / (2.0 * kPi * std::sqrt(det));
}

double beta_pdf_1d(double a, double b, double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const double norm = std::tgamma(a + b) / (std::tgamma(a) * std::tgamma(b));
  return norm * std::pow(t, a - 1.0) * std::pow(1.0 - t, b - 1.0);
}

}  // namespace

TEST_CASE("beta product density") {
  const BetaProduct m{1.5, 1.5, 2};
  // at (1/2, 1/2): marginal value Gamma(3)/Gamma(1.5)^2 * 1/2 = 4/pi
  const double marg = 4.0 / kPi;
  CHECK(model_density(m, std::vector<double>{0.5, 0.5}) ==
        doctest::Approx(marg * marg).epsilon(1e-13));

  const BetaProduct skew{2.0, 5.0, 1};
  for (const double t : {0.05, 0.3, 0.62, 0.97}) {
    CHECK(model_density(skew, std::vector<double>{t}) ==
          doctest::Approx(beta_pdf_1d(2.0, 5.0, t)).epsilon(1e-12));
  }
  CHECK(model_density(m, std::vector<double>{-0.1, 0.5}) == 0.0);
  CHECK(model_density(m, std::vector<double>{0.5, 1.0}) == 0.0);

  const double mass = oracle::simpson(
      [&](double t) { return model_density(skew, std::vector<double>{t}); }, 0.0, 1.0, 20000);
  CHECK(std::fabs(mass - 1.0) < 1e-6);
}

TEST_CASE("diagonal normal density") {
  const DiagNormal m{{1.0, 0.25}};
  const std::vector<double> x{0.3, -0.1};
  const double expect =
      oracle::normal_pdf(0.3) * oracle::normal_pdf(-0.1 / 0.25) / 0.25;
  CHECK(model_density(m, x) == doctest::Approx(expect).epsilon(1e-12));

  const DiagNormal m1{{0.7}};
  const double mass = oracle::simpson(
      [&](double t) { return model_density(m1, std::vector<double>{t}); }, -8.0, 8.0, 20000);
  CHECK(std::fabs(mass - 1.0) < 1e-6);
}

TEST_CASE("weibull product density") {
  // shape 1 is the exponential product
  const WeibullProduct expo{1.0, 1.0, 2, false};
  CHECK(model_density(expo, std::vector<double>{0.4, 1.3}) ==
        doctest::Approx(std::exp(-1.7)).epsilon(1e-13));
  CHECK(model_density(expo, std::vector<double>{-0.01, 1.0}) == 0.0);

  const WeibullProduct m{1.5, 2.0, 2, false};
  const auto marg = [&](double t) {
    return (2.0 / 1.5) * (t / 1.5) * std::exp(-(t / 1.5) * (t / 1.5));
  };
  for (const double t : {0.2, 0.9, 2.4})
    CHECK(model_density(m, std::vector<double>{t, t}) ==
          doctest::Approx(marg(t) * marg(t)).epsilon(1e-12));

  // pooling the radial exponent multiplies by (x1 x2)^((d-1)(k-1))
  const WeibullProduct pooled{1.5, 2.0, 2, true};
  const std::vector<double> x{0.8, 1.7};
  CHECK(model_density(pooled, x) ==
        doctest::Approx(model_density(m, x) * std::pow(0.8 * 1.7, 1.0)).epsilon(1e-12));
  // and changes nothing in one dimension or at shape 1
  CHECK(model_density(WeibullProduct{1.0, 1.0, 2, true}, std::vector<double>{0.4, 1.3}) ==
        doctest::Approx(std::exp(-1.7)).epsilon(1e-13));
}

TEST_CASE("mixture densities against the explicit-inverse transcription") {
  const NormalMixtureSharedCov shared{};
  const NormalMixtureTwoCov two{};
  for (const auto& xv : {std::vector<double>{0.0, 0.0}, std::vector<double>{-1.0, 1.0},
                         std::vector<double>{0.7, -0.3}, std::vector<double>{2.0, 2.0}}) {
    const double es = 0.5 * binormal_direct(shared.mu1, shared.s1_sq, shared.rho, shared.s2_sq, xv) +
                      0.5 * binormal_direct(shared.mu2, shared.s1_sq, shared.rho, shared.s2_sq, xv);
    CHECK(model_density(shared, xv) == doctest::Approx(es).epsilon(1e-12));
    const double et = 0.5 * binormal_direct(two.mu1, two.s1_sq, two.rho, two.s2_sq, xv) +
                      0.5 * binormal_direct(two.mu2, two.s2_sq, -two.rho, two.s1_sq, xv);
    CHECK(model_density(two, xv) == doctest::Approx(et).epsilon(1e-12));
  }
  // shared covariance makes the two component centers exchangeable
  CHECK(model_density(shared, std::vector<double>(shared.mu1.begin(), shared.mu1.end())) ==
        doctest::Approx(model_density(
                            shared, std::vector<double>(shared.mu2.begin(), shared.mu2.end())))
            .epsilon(1e-13));
}

TEST_CASE("model validation rejects degenerate parameters") {
  CHECK_THROWS_AS(validate(AnalyticModel{BetaProduct{0.0, 1.5, 2}}), std::invalid_argument);
  CHECK_THROWS_AS(validate(AnalyticModel{DiagNormal{{1.0, 0.0}}}), std::invalid_argument);
  CHECK_THROWS_AS(validate(AnalyticModel{DiagNormal{{}}}), std::invalid_argument);
  CHECK_THROWS_AS(validate(AnalyticModel{WeibullProduct{1.0, -2.0, 2, false}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate(AnalyticModel{WeibullProduct{1.0, 1.0, 0, false}}),
                  std::invalid_argument);
  NormalMixtureSharedCov bad{};
  bad.rho = 0.5;  // rho^2 >= s1_sq * s2_sq = 0.15
  CHECK_THROWS_AS(validate(AnalyticModel{bad}), std::invalid_argument);
  CHECK_NOTHROW(validate(AnalyticModel{NormalMixtureSharedCov{}}));
  CHECK_NOTHROW(validate(AnalyticModel{NormalMixtureTwoCov{}}));
}

TEST_CASE("samplers hit the analytic moments") {
  RngStream root(71);
  const std::size_t n = 100000;

  SUBCASE("diagonal normal") {
    const DiagNormal m{{1.0, 0.25}};
    RngStream s = root.child(1);
    const PointMatrix pts = model_sample(m, n, s);
    REQUIRE(pts.dim() == 2);
    for (std::size_t c = 0; c < 2; ++c) {
      double mean = 0.0, ss = 0.0;
      for (std::size_t i = 0; i < n; ++i) mean += pts.get(i, c);
      mean /= static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double dev = pts.get(i, c) - mean;
        ss += dev * dev;
      }
      const double var = ss / static_cast<double>(n - 1);
      const double sd = m.sigma[c];
      CHECK(std::fabs(mean) < 5.0 * sd / std::sqrt(static_cast<double>(n)));
      CHECK(std::fabs(var - sd * sd) < 0.05 * sd * sd);
    }
  }

  SUBCASE("beta product") {
    const BetaProduct m{1.5, 1.5, 1};
    RngStream s = root.child(2);
    const PointMatrix pts = model_sample(m, n, s);
    double mean = 0.0, ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(pts.get(i, 0) > 0.0);
      CHECK(pts.get(i, 0) < 1.0);
      mean += pts.get(i, 0);
    }
    mean /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double dev = pts.get(i, 0) - mean;
      ss += dev * dev;
    }
    // Beta(1.5, 1.5): mean 1/2, variance (1.5*1.5)/(3^2 * 4) = 1/16
    CHECK(std::fabs(mean - 0.5) < 0.004);
    CHECK(std::fabs(ss / static_cast<double>(n - 1) - 0.0625) < 0.003);
  }

  SUBCASE("weibull at shape one is exponential") {
    const WeibullProduct m{1.0, 1.0, 1, false};
    RngStream s = root.child(3);
    const PointMatrix pts = model_sample(m, n, s);
    std::size_t below = 0;
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(pts.get(i, 0) > 0.0);
      if (pts.get(i, 0) <= 1.0) ++below;
    }
    // P(X <= 1) = 1 - 1/e, five sigma is about 0.008
    const double frac = static_cast<double>(below) / static_cast<double>(n);
    CHECK(std::fabs(frac - (1.0 - std::exp(-1.0))) < 0.008);
  }

  SUBCASE("mixture mean sits between the component centers") {
    const NormalMixtureSharedCov m{};
    RngStream s = root.child(4);
    const PointMatrix pts = model_sample(m, n, s);
    double m0 = 0.0, m1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      m0 += pts.get(i, 0);
      m1 += pts.get(i, 1);
    }
    m0 /= static_cast<double>(n);
    m1 /= static_cast<double>(n);
    // coordinate one: mean 0, var = 0.5 + 1 (between-center spread)
    CHECK(std::fabs(m0 - 0.0) < 0.02);
    CHECK(std::fabs(m1 - 1.0) < 0.02);
  }
}

TEST_CASE("sampling replays under an equal stream") {
  const NormalMixtureTwoCov m{};
  RngStream root(77);
  RngStream a = root.child(5);
  RngStream b = root.child(5);
  const PointMatrix pa = model_sample(m, 200, a);
  const PointMatrix pb = model_sample(m, 200, b);
  for (std::size_t i = 0; i < 200; ++i) CHECK(pa.row(i) == pb.row(i));
}

TEST_CASE("unit ball volumes") {
  CHECK(unit_ball_volume(1) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(unit_ball_volume(2) == doctest::Approx(kPi).epsilon(1e-14));
  CHECK(unit_ball_volume(3) == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-14));
  CHECK(unit_ball_volume(4) == doctest::Approx(kPi * kPi / 2.0).epsilon(1e-14));
}

TEST_CASE("band volume growth rate for the isotropic normal") {
  SUBCASE("one dimension collapses to 2 over the density slope") {
    const DiagNormal m{{1.0}};
    const double rate = spherical_volume_rate(m, std::vector<double>{1.0});
    CHECK(rate == doctest::Approx(2.0 / oracle::normal_pdf(1.0)).epsilon(1e-12));
    CHECK(rate == doctest::Approx(8.26546).epsilon(2e-6));
  }
  SUBCASE("two dimensions at the reference point") {
    const DiagNormal m{{1.0, 1.0}};
    const std::vector<double> x{0.5, 0.5};
    const double fx = std::exp(-0.25) / (2.0 * kPi);
    const double rate = spherical_volume_rate(m, x);
    CHECK(rate == doctest::Approx(2.0 * kPi / fx).epsilon(1e-12));
  }
  SUBCASE("general formula in three dimensions") {
    const double s = 0.7;
    const DiagNormal m{{s, s, s}};
    const std::vector<double> x{0.4, 0.3, 0.2};
    const double norm = std::sqrt(0.16 + 0.09 + 0.04);
    const double fx = model_density(m, x);
    const double expect = 2.0 * std::pow(kPi, 1.5) * std::pow(norm, 2.0) * s * s /
                          (std::tgamma(1.5) * norm * fx);
    CHECK(spherical_volume_rate(m, x) == doctest::Approx(expect).epsilon(1e-12));
  }
  SUBCASE("rejects the origin and anisotropic scales") {
    CHECK_THROWS_AS(spherical_volume_rate(DiagNormal{{1.0, 1.0}}, std::vector<double>{0.0, 0.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(spherical_volume_rate(DiagNormal{{1.0, 0.5}}, std::vector<double>{0.5, 0.5}),
                    std::invalid_argument);
  }
}

TEST_CASE("band volume against the root-finding route") {
  struct Case {
    std::vector<double> sigma;
    std::vector<double> x;
    double eps;
  };
  const std::vector<Case> cases{
      {{1.0, 1.0}, {0.5, 0.5}, 0.005},
      {{1.0, 1.0}, {0.5, 0.5}, 0.02},
      {{1.0}, {0.8}, 0.01},
      {{0.7, 0.7, 0.7}, {0.4, 0.3, 0.2}, 0.002},
      {{0.5, 0.5}, {0.1, -0.2}, 0.05},
  };
  for (const auto& c : cases) {
    const DiagNormal m{c.sigma};
    const std::size_t d = c.sigma.size();
    const double s = c.sigma.front();
    double norm_sq = 0.0;
    for (double v : c.x) norm_sq += v * v;
    const double fx = model_density(m, c.x);
    const auto radial = [&](double r) {
      return std::pow(2.0 * kPi * s * s, -0.5 * static_cast<double>(d)) *
             std::exp(-0.5 * r * r / (s * s));
    };
    const double expect = oracle::radial_band_volume(radial, d, fx, c.eps, 40.0 * s);
    const double got = spherical_star_volume(m, c.x, c.eps);
    CHECK(got == doctest::Approx(expect).epsilon(1e-9));
  }

  SUBCASE("frozen reference value at the standard point") {
    const DiagNormal m{{1.0, 1.0}};
    const double v = spherical_star_volume(m, std::vector<double>{0.5, 0.5}, 0.005);
    CHECK(v == doctest::Approx(0.507188).epsilon(1e-5));
  }
  SUBCASE("at the mode the inner radius collapses") {
    const DiagNormal m{{1.0, 1.0}};
    const double peak = 1.0 / (2.0 * kPi);
    const double eps = 0.01;
    // shell becomes a full ball of radius given by the outer level
    const double r_out_sq = -2.0 * std::log((peak - eps) / peak);
    const double expect = kPi * r_out_sq;
    CHECK(spherical_star_volume(m, std::vector<double>{0.0, 0.0}, eps) ==
          doctest::Approx(expect).epsilon(1e-12));
  }
  SUBCASE("band touching zero is rejected") {
    const DiagNormal m{{1.0, 1.0}};
    CHECK_THROWS_AS(spherical_star_volume(m, std::vector<double>{3.0, 3.0}, 0.5),
                    std::invalid_argument);
  }
}

TEST_CASE("default boxes cover the right support") {
  const BoundingBox beta_box = default_test_box(AnalyticModel{BetaProduct{1.5, 1.5, 3}});
  CHECK(beta_box.lower == std::vector<double>{0.0, 0.0, 0.0});
  CHECK(beta_box.upper == std::vector<double>{1.0, 1.0, 1.0});

  const BoundingBox norm_box = default_test_box(AnalyticModel{DiagNormal{{1.0, 0.25}}});
  CHECK(norm_box.lower == std::vector<double>{-4.0, -1.0});
  CHECK(norm_box.upper == std::vector<double>{4.0, 1.0});

  const BoundingBox shared_box = default_test_box(AnalyticModel{NormalMixtureSharedCov{}});
  CHECK(shared_box.upper == std::vector<double>{1.0, 1.0});
  const BoundingBox shared_mc = default_mc_box(AnalyticModel{NormalMixtureSharedCov{}});
  CHECK(shared_mc.upper == std::vector<double>{2.0, 2.0});
  const BoundingBox two_box = default_test_box(AnalyticModel{NormalMixtureTwoCov{}});
  CHECK(two_box.upper == std::vector<double>{2.0, 2.0});

  // weibull box reaches the 1e-3 survival quantile
  const WeibullProduct w{2.0, 1.0, 2, false};
  const BoundingBox wb = default_test_box(AnalyticModel{w});
  CHECK(wb.upper[0] == doctest::Approx(2.0 * (-std::log(1e-3))).epsilon(1e-12));

  CHECK(describe(AnalyticModel{w}).size() > 0);
  CHECK(model_dim(AnalyticModel{w}) == 2);
  CHECK(model_dim(AnalyticModel{NormalMixtureTwoCov{}}) == 2);
}
