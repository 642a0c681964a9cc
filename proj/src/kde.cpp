#include "levelagg/kde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "levelagg/parallel.hpp"
#include "levelagg/simd.hpp"

namespace levelagg {

namespace {

double pow_int(double base, std::size_t e) {
  double out = 1.0;
  for (std::size_t i = 0; i < e; ++i) out *= base;
  return out;
}

}  // namespace

KdeEstimator::KdeEstimator(PointMatrix sample, double bandwidth, KernelKind kernel)
    : sample_(std::make_shared<const PointMatrix>(std::move(sample))),
      cols_(sample_->col_ptrs()),
      h_(bandwidth),
      kernel_(kernel) {
  if (sample_->empty()) throw std::invalid_argument("KdeEstimator: empty sample");
  if (!(h_ > 0.0)) throw std::invalid_argument("KdeEstimator: bandwidth must be positive");
}

std::size_t KdeEstimator::dim() const { return sample_->dim(); }
std::size_t KdeEstimator::sample_size() const { return sample_->size(); }

double KdeEstimator::operator()(std::span<const double> x) const {
  const std::size_t d = sample_->dim();
  if (x.size() != d) throw std::invalid_argument("KdeEstimator: query dimension mismatch");
  const std::size_t n = sample_->size();
  const auto& s = simd::ops();
  const double hd = pow_int(h_, d);
  switch (kernel_) {
    case KernelKind::Gaussian: {
      const double sum = s.gauss_weight_sum(cols_.data(), n, d, x.data(), 1.0 / (2.0 * h_ * h_));
      return sum / (static_cast<double>(n) * hd *
                    std::pow(2.0 * std::numbers::pi, 0.5 * static_cast<double>(d)));
    }
    case KernelKind::Epanechnikov:
      return s.epan_prod_sum(cols_.data(), n, d, x.data(), 1.0 / h_) /
             (static_cast<double>(n) * hd);
    case KernelKind::Indicator:
      return s.box_prod_sum(cols_.data(), n, d, x.data(), 1.0 / h_) /
             (static_cast<double>(n) * hd);
  }
  throw std::invalid_argument("KdeEstimator: unknown kernel");
}

void KdeEstimator::eval_many(const PointMatrix& queries, double* out) const {
  if (queries.dim() != sample_->dim())
    throw std::invalid_argument("KdeEstimator: query dimension mismatch");
  parallel_for(queries.size(), [&](std::size_t i) {
    std::vector<double> x(queries.dim());
    queries.row_into(i, x.data());
    out[i] = (*this)(x);
  });
}

DensityFn KdeEstimator::as_density() const {
  KdeEstimator copy = *this;
  return [copy](std::span<const double> x) { return copy(x); };
}

double lscv_score(const PointMatrix& sample, double h, KernelKind kernel) {
  const std::size_t n = sample.size();
  const std::size_t d = sample.dim();
  if (n < 2) throw std::invalid_argument("lscv_score: needs at least two points");
  if (!(h > 0.0)) throw std::invalid_argument("lscv_score: bandwidth must be positive");
  const auto cols = sample.col_ptrs();
  const auto& s = simd::ops();
  const double nd = static_cast<double>(n);
  const double hd = pow_int(h, d);

  if (kernel == KernelKind::Gaussian) {
    const double conv = s.gauss_pair_sum(cols.data(), n, d, 1.0 / (4.0 * h * h));
    const double loo = s.gauss_pair_sum(cols.data(), n, d, 1.0 / (2.0 * h * h));
    const double integral =
        (nd + 2.0 * conv) /
        (nd * nd * hd * std::pow(4.0 * std::numbers::pi, 0.5 * static_cast<double>(d)));
    const double loo_term =
        4.0 * loo /
        (nd * (nd - 1.0) * hd * std::pow(2.0 * std::numbers::pi, 0.5 * static_cast<double>(d)));
    return integral - loo_term;
  }

  const bool epan = kernel == KernelKind::Epanechnikov;
  double conv = 0.0, loo = 0.0;
  s.compact_pair_sums(cols.data(), n, d, 1.0 / h, epan, &conv, &loo);
  const double conv0 = epan ? 0.6 : 2.0;  // kernel autocorrelation at 0
  const double integral = (nd * pow_int(conv0, d) + 2.0 * conv) / (nd * nd * hd);
  const double loo_term = 4.0 * loo / (nd * (nd - 1.0) * hd);
  return integral - loo_term;
}

double silverman_reference(const PointMatrix& sample) {
  const std::size_t n = sample.size();
  const std::size_t d = sample.dim();
  if (n < 2) throw std::invalid_argument("silverman_reference: needs at least two points");
  double var_sum = 0.0;
  for (std::size_t c = 0; c < d; ++c) {
    const double* col = sample.col(c);
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += col[i];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dev = col[i] - mean;
      ss += dev * dev;
    }
    var_sum += ss / (static_cast<double>(n) - 1.0);
  }
  const double sigma = std::sqrt(var_sum / static_cast<double>(d));
  if (!(sigma > 0.0))
    throw std::invalid_argument("silverman_reference: sample has zero spread");
  const double dd = static_cast<double>(d);
  return std::pow(4.0 / (dd + 2.0), 1.0 / (dd + 4.0)) * sigma *
         std::pow(static_cast<double>(n), -1.0 / (dd + 4.0));
}

std::vector<double> bandwidth_grid(const PointMatrix& sample, std::size_t size, double lo_frac,
                                   double hi_frac) {
  if (size < 2) throw std::invalid_argument("bandwidth_grid: needs at least two grid values");
  if (!(lo_frac > 0.0) || !(hi_frac > lo_frac))
    throw std::invalid_argument("bandwidth_grid: bad range fractions");
  const double href = silverman_reference(sample);
  const double lo = std::log(lo_frac * href);
  const double hi = std::log(hi_frac * href);
  std::vector<double> grid(size);
  for (std::size_t i = 0; i < size; ++i)
    grid[i] = std::exp(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(size - 1));
  return grid;
}

double select_bandwidth(const PointMatrix& sample, KernelKind kernel,
                        std::span<const double> grid) {
  if (grid.empty()) throw std::invalid_argument("select_bandwidth: empty grid");
  std::vector<double> scores(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) { scores[i] = lscv_score(sample, grid[i], kernel); });
  std::size_t best = 0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (scores[i] < scores[best] || (scores[i] == scores[best] && grid[i] < grid[best]))
      best = i;
  }
  return grid[best];
}

std::vector<KdeEstimator> build_bank(const PointMatrix& sample, double base,
                                     std::span<const double> multipliers, KernelKind kernel) {
  if (multipliers.empty()) throw std::invalid_argument("build_bank: no multipliers");
  if (!(base > 0.0)) throw std::invalid_argument("build_bank: base bandwidth must be positive");
  std::vector<KdeEstimator> bank;
  bank.reserve(multipliers.size());
  for (double m : multipliers) {
    if (!(m > 0.0)) throw std::invalid_argument("build_bank: multipliers must be positive");
    bank.emplace_back(sample, base * m, kernel);
  }
  return bank;
}

}  // namespace levelagg
