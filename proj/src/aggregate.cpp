#include "levelagg/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "levelagg/parallel.hpp"
#include "levelagg/simd.hpp"
#include "levelagg/stats.hpp"

namespace levelagg {

namespace {

bool smoothed_variant(Variant v) {
  return v == Variant::Smoothed || v == Variant::EtaSmoothed;
}

bool eta_variant(Variant v) {
  return v == Variant::EtaCounting || v == Variant::EtaSmoothed;
}

void check_params(const AggregateParams& p) {
  if (!(p.epsilon > 0.0) || !std::isfinite(p.epsilon))
    throw std::invalid_argument("aggregate: epsilon must be positive and finite");
  if (!(p.eta >= 0.0 && p.eta < 1.0))
    throw std::invalid_argument("aggregate: eta must lie in [0, 1)");
  if (p.eta > 0.0 && !eta_variant(p.variant))
    throw std::invalid_argument("aggregate: eta > 0 requires an eta variant");
  if (smoothed_variant(p.variant)) smooth_weight(p.smooth_kernel, 0.0);
}

std::vector<const double*> row_ptrs(const std::vector<std::vector<double>>& rows) {
  std::vector<const double*> ptrs(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) ptrs[r] = rows[r].data();
  return ptrs;
}

//! Membership flips at the need_hits-th smallest bank deviation; computing it
//! once per point lets a whole epsilon grid reuse one pass over the tables.
void crit_values(const std::vector<std::vector<double>>& rows, std::span<const double> centers,
                 std::size_t need_hits, std::vector<double>& out) {
  const std::size_t m = rows.size();
  const std::size_t n = rows.front().size();
  out.resize(n);
  const auto ptrs = row_ptrs(rows);
  if (need_hits >= m) {
    simd::ops().max_abs_dev(ptrs.data(), m, n, centers.data(), out.data());
    return;
  }
  std::vector<double> buf(m);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t r = 0; r < m; ++r) buf[r] = std::fabs(rows[r][j] - centers[r]);
    std::nth_element(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(need_hits - 1),
                     buf.end());
    out[j] = buf[need_hits - 1];
  }
}

}  // namespace

Variant parse_variant(const std::string& name) {
  if (name == "counting") return Variant::Counting;
  if (name == "smoothed") return Variant::Smoothed;
  if (name == "eta_counting") return Variant::EtaCounting;
  if (name == "eta_smoothed") return Variant::EtaSmoothed;
  throw std::invalid_argument("unknown variant: " + name);
}

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::Counting:
      return "counting";
    case Variant::Smoothed:
      return "smoothed";
    case Variant::EtaCounting:
      return "eta_counting";
    case Variant::EtaSmoothed:
      return "eta_smoothed";
  }
  return "?";
}

AggregatedEstimator::AggregatedEstimator(std::vector<DensityFn> bank,
                                         const PointMatrix& eval_sample, AggregateParams params,
                                         BoundingBox mc_box, const PointMatrix& draws)
    : bank_(std::move(bank)), params_(params), box_(std::move(mc_box)) {
  check_params(params_);
  if (draws.empty()) throw std::invalid_argument("aggregate: no volume draws");
  if (draws.dim() != eval_sample.dim())
    throw std::invalid_argument("aggregate: draw dimension mismatch");
  init_tables(eval_sample, &draws);
}

AggregatedEstimator::AggregatedEstimator(std::vector<DensityFn> bank,
                                         const PointMatrix& eval_sample, AggregateParams params,
                                         BoundingBox mc_box, std::size_t n_mc,
                                         RngStream volume_stream)
    : bank_(std::move(bank)), params_(params), box_(mc_box) {
  check_params(params_);
  if (n_mc == 0) throw std::invalid_argument("aggregate: needs at least one volume draw");
  const PointMatrix draws = uniform_box_sample(box_, n_mc, volume_stream);
  if (draws.dim() != eval_sample.dim())
    throw std::invalid_argument("aggregate: draw dimension mismatch");
  init_tables(eval_sample, &draws);
}

AggregatedEstimator::AggregatedEstimator(std::vector<DensityFn> bank,
                                         const PointMatrix& eval_sample, AggregateParams params,
                                         ExactVolumeFn exact_volume)
    : bank_(std::move(bank)), params_(params), exact_volume_(std::move(exact_volume)) {
  check_params(params_);
  if (!exact_volume_) throw std::invalid_argument("aggregate: missing volume function");
  init_tables(eval_sample, nullptr);
}

void AggregatedEstimator::init_tables(const PointMatrix& eval_sample, const PointMatrix* draws) {
  if (bank_.empty()) throw std::invalid_argument("aggregate: empty density bank");
  if (eval_sample.empty()) throw std::invalid_argument("aggregate: empty held-out sample");
  dim_ = eval_sample.dim();
  l_ = eval_sample.size();
  const std::size_t m = bank_.size();

  v_.assign(m, std::vector<double>(l_));
  parallel_for(l_, [&](std::size_t j) {
    std::vector<double> y(dim_);
    eval_sample.row_into(j, y.data());
    for (std::size_t r = 0; r < m; ++r) v_[r][j] = bank_[r](y);
  });

  if (draws != nullptr) {
    n_mc_ = draws->size();
    w_.assign(m, std::vector<double>(n_mc_));
    parallel_for(n_mc_, [&](std::size_t j) {
      std::vector<double> y(dim_);
      draws->row_into(j, y.data());
      for (std::size_t r = 0; r < m; ++r) w_[r][j] = bank_[r](y);
    });
  }
}

const BoundingBox& AggregatedEstimator::mc_box() const {
  if (exact_volume_) throw std::logic_error("aggregate: exact-volume mode has no box");
  return box_;
}

std::vector<double> AggregatedEstimator::bank_values(std::span<const double> x) const {
  if (x.size() != dim_) throw std::invalid_argument("aggregate: query dimension mismatch");
  std::vector<double> centers(bank_.size());
  for (std::size_t r = 0; r < bank_.size(); ++r) centers[r] = bank_[r](x);
  return centers;
}

void AggregatedEstimator::numerator_grid(std::span<const double> centers,
                                         std::span<const double> eps_grid,
                                         double* out_fraction) const {
  const std::size_t m = bank_.size();
  const double ld = static_cast<double>(l_);
  if (!smoothed_variant(params_.variant)) {
    const double need = eta_variant(params_.variant) ? eta_required(m, params_.eta)
                                                     : static_cast<double>(m);
    const std::size_t need_hits =
        std::min<std::size_t>(m, static_cast<std::size_t>(std::max(1.0, std::ceil(need))));
    std::vector<double> crit;
    crit_values(v_, centers, need_hits, crit);
    for (std::size_t g = 0; g < eps_grid.size(); ++g)
      out_fraction[g] =
          static_cast<double>(simd::ops().count_below(crit.data(), l_, eps_grid[g])) / ld;
    return;
  }
  const bool epan = params_.smooth_kernel == KernelKind::Epanechnikov;
  const double gate =
      eta_variant(params_.variant) ? eta_required(m, params_.eta) : 0.0;
  const auto ptrs = row_ptrs(v_);
  for (std::size_t g = 0; g < eps_grid.size(); ++g)
    out_fraction[g] =
        simd::ops().smooth_prod_sum(ptrs.data(), m, l_, centers.data(), eps_grid[g], epan, gate) /
        ld;
}

void AggregatedEstimator::volume_grid(std::span<const double> centers,
                                      std::span<const double> eps_grid,
                                      double* out_volume) const {
  const std::size_t m = bank_.size();
  const double need = eta_variant(params_.variant) ? eta_required(m, params_.eta)
                                                   : static_cast<double>(m);
  const std::size_t need_hits =
      std::min<std::size_t>(m, static_cast<std::size_t>(std::max(1.0, std::ceil(need))));
  std::vector<double> crit;
  crit_values(w_, centers, need_hits, crit);
  const double box_vol = box_.volume();
  const double draws = static_cast<double>(n_mc_);
  for (std::size_t g = 0; g < eps_grid.size(); ++g) {
    const double hits =
        static_cast<double>(simd::ops().count_below(crit.data(), n_mc_, eps_grid[g]));
    out_volume[g] = box_vol * (hits / draws);
  }
}

void AggregatedEstimator::eval_grid(std::span<const double> centers,
                                    std::span<const double> eps_grid, double* out_value,
                                    unsigned char* out_degenerate) const {
  if (exact_volume_) throw std::logic_error("aggregate: eval_grid needs volume draws");
  if (centers.size() != bank_.size())
    throw std::invalid_argument("aggregate: bank value count mismatch");
  if (eps_grid.empty()) throw std::invalid_argument("aggregate: empty epsilon grid");
  for (double e : eps_grid)
    if (!(e > 0.0)) throw std::invalid_argument("aggregate: epsilon must be positive");

  std::vector<double> fraction(eps_grid.size());
  std::vector<double> volume(eps_grid.size());
  numerator_grid(centers, eps_grid, fraction.data());
  volume_grid(centers, eps_grid, volume.data());
  for (std::size_t g = 0; g < eps_grid.size(); ++g) {
    if (volume[g] == 0.0) {
      out_value[g] = 0.0;
      out_degenerate[g] = fraction[g] == 0.0 ? 0 : 1;
    } else {
      out_value[g] = fraction[g] / volume[g];
      out_degenerate[g] = 0;
    }
  }
}

double AggregatedEstimator::count_fraction(std::span<const double> x) const {
  const auto centers = bank_values(x);
  const std::size_t m = bank_.size();
  const double need = eta_variant(params_.variant) ? eta_required(m, params_.eta)
                                                   : static_cast<double>(m);
  const std::size_t need_hits =
      std::min<std::size_t>(m, static_cast<std::size_t>(std::max(1.0, std::ceil(need))));
  std::vector<double> crit;
  crit_values(v_, centers, need_hits, crit);
  return static_cast<double>(simd::ops().count_below(crit.data(), l_, params_.epsilon)) /
         static_cast<double>(l_);
}

double AggregatedEstimator::smooth_fraction(std::span<const double> x) const {
  const auto centers = bank_values(x);
  const std::size_t m = bank_.size();
  const bool epan = params_.smooth_kernel == KernelKind::Epanechnikov;
  const double gate =
      eta_variant(params_.variant) ? eta_required(m, params_.eta) : 0.0;
  const auto ptrs = row_ptrs(v_);
  return simd::ops().smooth_prod_sum(ptrs.data(), m, l_, centers.data(), params_.epsilon, epan,
                                     gate) /
         static_cast<double>(l_);
}

double AggregatedEstimator::neighborhood_volume(std::span<const double> x) const {
  if (exact_volume_) return exact_volume_(x, params_.epsilon);
  const auto centers = bank_values(x);
  double vol = 0.0;
  volume_grid(centers, std::span<const double>(&params_.epsilon, 1), &vol);
  return vol;
}

double AggregatedEstimator::eval(std::span<const double> x) const {
  const auto centers = bank_values(x);
  const std::span<const double> eps(&params_.epsilon, 1);
  if (!exact_volume_) {
    double value = 0.0;
    unsigned char degenerate = 0;
    eval_grid(centers, eps, &value, &degenerate);
    if (degenerate)
      throw DegenerateVolumeError("aggregate: zero volume with nonzero membership fraction");
    return value;
  }
  double fraction = 0.0;
  numerator_grid(centers, eps, &fraction);
  const double vol = exact_volume_(x, params_.epsilon);
  if (!(vol >= 0.0)) throw std::invalid_argument("aggregate: negative volume");
  if (vol == 0.0) {
    if (fraction == 0.0) return 0.0;
    throw DegenerateVolumeError("aggregate: zero volume with nonzero membership fraction");
  }
  return fraction / vol;
}

std::vector<double> mean_density(const std::vector<KdeEstimator>& bank, const PointMatrix& pts) {
  if (bank.empty()) throw std::invalid_argument("mean_density: empty bank");
  std::vector<double> acc(pts.size(), 0.0);
  std::vector<double> tmp(pts.size());
  for (const auto& est : bank) {
    est.eval_many(pts, tmp.data());
    for (std::size_t i = 0; i < pts.size(); ++i) acc[i] += tmp[i];
  }
  const double m = static_cast<double>(bank.size());
  for (double& v : acc) v /= m;
  return acc;
}

std::vector<double> default_eps_grid(std::span<const double> reference, std::size_t size,
                                     double lo_frac, double hi_frac) {
  if (size < 2) throw std::invalid_argument("default_eps_grid: needs at least two values");
  if (!(lo_frac > 0.0) || !(hi_frac > lo_frac))
    throw std::invalid_argument("default_eps_grid: bad range fractions");
  double spread = quantile(reference, 0.75) - quantile(reference, 0.25);
  if (!(spread > 0.0)) {
    const auto [mn, mx] = std::minmax_element(reference.begin(), reference.end());
    spread = *mx - *mn;
  }
  if (!(spread > 0.0))
    throw SelectionFailedError("default_eps_grid: reference density has no spread");
  const double lo = std::log(lo_frac * spread);
  const double hi = std::log(hi_frac * spread);
  std::vector<double> grid(size);
  for (std::size_t i = 0; i < size; ++i)
    grid[i] = std::exp(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(size - 1));
  return grid;
}

EpsilonSelection select_epsilon(const AggregatedEstimator& est,
                                std::span<const double> reference,
                                const PointMatrix& eval_points, const BoundingBox& eval_box,
                                std::span<const double> eps_grid) {
  if (est.exact_volume_mode())
    throw std::logic_error("select_epsilon: needs a volume-draw estimator");
  const std::size_t n = eval_points.size();
  const std::size_t g_count = eps_grid.size();
  if (n == 0) throw std::invalid_argument("select_epsilon: no evaluation points");
  if (reference.size() != n)
    throw std::invalid_argument("select_epsilon: reference length mismatch");
  if (g_count == 0) throw std::invalid_argument("select_epsilon: empty grid");

  EpsilonSelection sel;
  sel.values.assign(n * g_count, 0.0);
  std::vector<unsigned char> flags(n * g_count, 0);
  parallel_for(n, [&](std::size_t i) {
    std::vector<double> x(eval_points.dim());
    eval_points.row_into(i, x.data());
    const auto centers = est.bank_values(x);
    est.eval_grid(centers, eps_grid, sel.values.data() + i * g_count,
                  flags.data() + i * g_count);
  });

  sel.degenerate.assign(g_count, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t g = 0; g < g_count; ++g) sel.degenerate[g] += flags[i * g_count + g];

  const double box_vol = eval_box.volume();
  sel.distance.assign(g_count, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t g = 0; g < g_count; ++g) {
    if (2 * sel.degenerate[g] >= n) continue;  // disqualified
    const std::size_t n_valid = n - sel.degenerate[g];
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (flags[i * g_count + g]) continue;
      const double d = sel.values[i * g_count + g] - reference[i];
      ss += d * d;
    }
    sel.distance[g] = std::sqrt(box_vol / static_cast<double>(n_valid) * ss);
  }

  // grid scanned in ascending epsilon order so ties keep the smallest
  std::vector<std::size_t> order(g_count);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return eps_grid[a] < eps_grid[b]; });
  bool found = false;
  std::size_t best = 0;
  for (std::size_t idx : order) {
    if (std::isnan(sel.distance[idx])) continue;
    if (!found || sel.distance[idx] < sel.distance[best]) {
      best = idx;
      found = true;
    }
  }
  if (!found)
    throw SelectionFailedError(
        "select_epsilon: every grid value degenerated on at least half the points");
  sel.index = best;
  sel.epsilon = eps_grid[best];
  sel.flags = std::move(flags);
  return sel;
}

EpsilonSelection select_epsilon(const std::vector<KdeEstimator>& whole_sample_bank,
                                const AggregatedEstimator& est, const PointMatrix& eval_points,
                                const BoundingBox& eval_box, std::span<const double> eps_grid) {
  const auto reference = mean_density(whole_sample_bank, eval_points);
  return select_epsilon(est, reference, eval_points, eval_box, eps_grid);
}

}  // namespace levelagg
