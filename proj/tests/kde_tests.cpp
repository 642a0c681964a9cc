#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "levelagg/kde.hpp"
#include "levelagg/parallel.hpp"
#include "levelagg/points.hpp"
#include "levelagg/rng.hpp"
#include "support/oracles.hpp"

using namespace levelagg;

namespace {

PointMatrix random_points(std::size_t dim, std::size_t n, RngStream& stream, double scale) {
  PointMatrix pts(dim, n);
  for (std::size_t c = 0; c < dim; ++c)
    for (std::size_t i = 0; i < n; ++i) pts.set(i, c, scale * (stream.uniform() - 0.5));
  return pts;
}

std::vector<std::vector<double>> as_rows(const PointMatrix& pts) {
  std::vector<std::vector<double>> rows(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) rows[i] = pts.row(i);
  return rows;
}

char kind_tag(KernelKind kind) {
  if (kind == KernelKind::Gaussian) return 'g';
  if (kind == KernelKind::Epanechnikov) return 'e';
  return 'b';
}

}  // namespace

TEST_CASE("kde matches a direct transcription of the sum") {
  RngStream stream(41);
  for (const std::size_t dim : {std::size_t{1}, std::size_t{2}, std::size_t{3}}) {
    const PointMatrix pts = random_points(dim, 37, stream, 4.0);
    const auto rows = as_rows(pts);
    for (const auto kind :
         {KernelKind::Gaussian, KernelKind::Epanechnikov, KernelKind::Indicator}) {
      const KdeEstimator kde(pts, 0.6, kind);
      for (int q = 0; q < 12; ++q) {
        std::vector<double> x(dim);
        for (auto& v : x) v = 5.0 * (stream.uniform() - 0.5);
        const double expect = oracle::kde_direct(rows, 0.6, kind_tag(kind), x);
        const double got = kde(x);
        CHECK(std::fabs(got - expect) <= 1e-12 * std::max(1.0, std::fabs(expect)));
      }
    }
  }
}

TEST_CASE("a single training point reproduces the scaled kernel") {
  const PointMatrix pts = PointMatrix::from_rows(1, std::vector<double>{0.0});
  const KdeEstimator kde(pts, 1.0, KernelKind::Gaussian);
  CHECK(kde(std::vector<double>{0.0}) ==
        doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-14));
}

TEST_CASE("eval_many agrees with pointwise calls for any worker count") {
  RngStream stream(7);
  const PointMatrix pts = random_points(2, 50, stream, 3.0);
  const PointMatrix queries = random_points(2, 64, stream, 4.0);
  const KdeEstimator kde(pts, 0.4, KernelKind::Gaussian);
  std::vector<double> direct(queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i) direct[i] = kde(queries.row(i));
  for (const int workers : {1, 4}) {
    set_thread_count(workers);
    std::vector<double> out(queries.size());
    kde.eval_many(queries, out.data());
    CHECK(out == direct);
  }
  set_thread_count(1);
}

TEST_CASE("one-dimensional estimates integrate to one") {
  RngStream stream(11);
  const PointMatrix pts = random_points(1, 40, stream, 2.0);
  const double h = 0.35;
  std::vector<double> xs(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) xs[i] = pts.get(i, 0);
  const auto [mn, mx] = std::minmax_element(xs.begin(), xs.end());

  SUBCASE("gaussian") {
    const KdeEstimator kde(pts, h, KernelKind::Gaussian);
    const double mass = oracle::simpson(
        [&](double t) { return kde(std::vector<double>{t}); }, *mn - 10.0 * h, *mx + 10.0 * h,
        8000);
    CHECK(std::fabs(mass - 1.0) < 1e-9);
  }
  SUBCASE("epanechnikov") {
    const KdeEstimator kde(pts, h, KernelKind::Epanechnikov);
    std::vector<double> breaks;
    for (double xi : xs) {
      breaks.push_back(xi - h);
      breaks.push_back(xi + h);
    }
    const double mass = oracle::simpson_segmented(
        [&](double t) { return kde(std::vector<double>{t}); }, *mn - h, *mx + h, breaks, 400);
    CHECK(std::fabs(mass - 1.0) < 1e-9);
  }
  SUBCASE("flat window carries mass two") {
    const KdeEstimator kde(pts, h, KernelKind::Indicator);
    std::vector<double> breaks;
    for (double xi : xs) {
      breaks.push_back(xi - h);
      breaks.push_back(xi + h);
    }
    const double mass = oracle::simpson_segmented(
        [&](double t) { return kde(std::vector<double>{t}); }, *mn - h, *mx + h, breaks, 400);
    CHECK(std::fabs(mass - 2.0) < 1e-9);
  }
}

TEST_CASE("cross-validation score matches the quadrature route") {
  RngStream stream(19);
  for (const std::size_t n : {std::size_t{3}, std::size_t{7}, std::size_t{10}}) {
    const PointMatrix pts = random_points(1, n, stream, 3.0);
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) xs[i] = pts.get(i, 0);
    for (const double h : {0.3, 0.7, 1.4}) {
      for (const auto kind :
           {KernelKind::Gaussian, KernelKind::Epanechnikov, KernelKind::Indicator}) {
        const double expect = oracle::lscv_direct_1d(xs, h, kind_tag(kind));
        const double got = lscv_score(pts, h, kind);
        CHECK(std::fabs(got - expect) < 1e-6);
      }
    }
  }
}

TEST_CASE("cross-validation score is exchangeable in the sample order") {
  const std::vector<double> fwd{0.3, -1.2, 0.8, 2.1, -0.4};
  std::vector<double> rev(fwd.rbegin(), fwd.rend());
  const PointMatrix a = PointMatrix::from_rows(1, fwd);
  const PointMatrix b = PointMatrix::from_rows(1, rev);
  CHECK(lscv_score(a, 0.5, KernelKind::Gaussian) ==
        doctest::Approx(lscv_score(b, 0.5, KernelKind::Gaussian)).epsilon(1e-13));
}

TEST_CASE("normal-reference bandwidth follows the plug-in formula") {
  RngStream stream(23);
  const std::size_t n = 200;
  const PointMatrix pts = random_points(1, n, stream, 2.0);
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += pts.get(i, 0);
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dev = pts.get(i, 0) - mean;
    ss += dev * dev;
  }
  const double sigma = std::sqrt(ss / static_cast<double>(n - 1));
  const double expect =
      std::pow(4.0 / 3.0, 0.2) * sigma * std::pow(static_cast<double>(n), -0.2);
  CHECK(silverman_reference(pts) == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("bandwidth grid is log spaced around the reference value") {
  RngStream stream(29);
  const PointMatrix pts = random_points(2, 80, stream, 2.0);
  const double href = silverman_reference(pts);
  const auto grid = bandwidth_grid(pts);
  REQUIRE(grid.size() == 30);
  CHECK(grid.front() == doctest::Approx(0.1 * href).epsilon(1e-12));
  CHECK(grid.back() == doctest::Approx(3.0 * href).epsilon(1e-12));
  for (std::size_t i = 1; i < grid.size(); ++i) {
    CHECK(grid[i] > grid[i - 1]);
    if (i >= 2)  // constant ratio
      CHECK(grid[i] / grid[i - 1] ==
            doctest::Approx(grid[i - 1] / grid[i - 2]).epsilon(1e-10));
  }
}

TEST_CASE("bandwidth selection is the grid argmin, ties to the smaller value") {
  RngStream stream(31);
  const PointMatrix pts = random_points(1, 60, stream, 2.0);
  const auto grid = bandwidth_grid(pts, 12);
  for (const auto kind : {KernelKind::Gaussian, KernelKind::Epanechnikov}) {
    const double chosen = select_bandwidth(pts, kind, grid);
    double best = grid[0];
    double best_score = lscv_score(pts, grid[0], kind);
    for (std::size_t g = 1; g < grid.size(); ++g) {
      const double score = lscv_score(pts, grid[g], kind);
      if (score < best_score) {
        best_score = score;
        best = grid[g];
      }
    }
    CHECK(chosen == best);
  }
  // a grid whose best value appears twice must come back, not its duplicate's score
  const std::vector<double> dup{0.5, 0.5, 2.0};
  const double chosen = select_bandwidth(pts, KernelKind::Gaussian, dup);
  CHECK(chosen == 0.5);
}

TEST_CASE("bank bandwidths scale the base by each multiplier") {
  RngStream stream(37);
  const PointMatrix pts = random_points(2, 30, stream, 2.0);
  const std::vector<double> mult{0.9, 0.95, 1.0, 1.05, 1.1};
  const auto bank = build_bank(pts, 0.8, mult, KernelKind::Epanechnikov);
  REQUIRE(bank.size() == mult.size());
  for (std::size_t m = 0; m < mult.size(); ++m) {
    CHECK(bank[m].bandwidth() == doctest::Approx(0.8 * mult[m]).epsilon(1e-15));
    CHECK(bank[m].kernel() == KernelKind::Epanechnikov);
    CHECK(bank[m].sample_size() == pts.size());
  }
  CHECK_THROWS_AS(build_bank(pts, 0.8, std::vector<double>{1.0, 0.0}, KernelKind::Gaussian),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_bank(pts, -1.0, mult, KernelKind::Gaussian), std::invalid_argument);
}

TEST_CASE("as_density wraps the estimator unchanged") {
  RngStream stream(43);
  const PointMatrix pts = random_points(2, 25, stream, 2.0);
  const KdeEstimator kde(pts, 0.5, KernelKind::Gaussian);
  const DensityFn f = kde.as_density();
  for (int q = 0; q < 10; ++q) {
    const std::vector<double> x{stream.uniform(), stream.uniform()};
    CHECK(f(x) == kde(x));
  }
}

TEST_CASE("kde rejects bad construction and queries") {
  RngStream stream(47);
  const PointMatrix pts = random_points(2, 10, stream, 1.0);
  CHECK_THROWS_AS(KdeEstimator(pts, 0.0, KernelKind::Gaussian), std::invalid_argument);
  CHECK_THROWS_AS(KdeEstimator(PointMatrix(2, 0), 0.5, KernelKind::Gaussian),
                  std::invalid_argument);
  const KdeEstimator kde(pts, 0.5, KernelKind::Gaussian);
  CHECK_THROWS_AS(kde(std::vector<double>{0.0}), std::invalid_argument);
  CHECK_THROWS_AS(lscv_score(pts, -0.5, KernelKind::Gaussian), std::invalid_argument);
  CHECK_THROWS_AS(lscv_score(PointMatrix::from_rows(1, std::vector<double>{1.0}), 0.5,
                             KernelKind::Gaussian),
                  std::invalid_argument);
}
