#include "levelagg/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "levelagg/parallel.hpp"

namespace levelagg {

namespace {

void check_common(std::size_t k, std::size_t l, std::size_t replicates) {
  if (k == 0 || l == 0) throw std::invalid_argument("experiment: k and l must be positive");
  if (replicates == 0) throw std::invalid_argument("experiment: needs at least one replicate");
}

BoundingBox resolve_box(const std::optional<BoundingBox>& given, BoundingBox fallback,
                        std::size_t dim, const char* what) {
  BoundingBox box = given.value_or(std::move(fallback));
  if (box.dim() != dim)
    throw std::invalid_argument(std::string("experiment: ") + what + " dimension mismatch");
  return box;
}

double masked_l2(std::span<const double> estimate, std::span<const double> truth,
                 std::span<const unsigned char> drop, double box_volume) {
  double ss = 0.0;
  std::size_t kept = 0;
  for (std::size_t i = 0; i < estimate.size(); ++i) {
    if (drop[i]) continue;
    const double d = estimate[i] - truth[i];
    ss += d * d;
    ++kept;
  }
  if (kept == 0) throw std::invalid_argument("experiment: every test point degenerated");
  return std::sqrt(box_volume / static_cast<double>(kept) * ss);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace

double l2_error(std::span<const double> estimate, std::span<const double> truth,
                double box_volume) {
  if (estimate.size() != truth.size() || estimate.empty())
    throw std::invalid_argument("l2_error: length mismatch");
  double ss = 0.0;
  for (std::size_t i = 0; i < estimate.size(); ++i) {
    const double d = estimate[i] - truth[i];
    ss += d * d;
  }
  return std::sqrt(box_volume / static_cast<double>(estimate.size()) * ss);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  validate(cfg.model);
  check_common(cfg.k, cfg.l, cfg.replicates);
  if (cfg.n_test == 0 || cfg.n_mc == 0)
    throw std::invalid_argument("experiment: n_test and n_mc must be positive");
  if (cfg.multipliers.empty())
    throw std::invalid_argument("experiment: needs at least one bandwidth multiplier");
  const std::size_t dim = model_dim(cfg.model);
  const BoundingBox test_box =
      resolve_box(cfg.test_box, default_test_box(cfg.model), dim, "test box");
  const BoundingBox mc_box = resolve_box(cfg.mc_box, default_mc_box(cfg.model), dim, "mc box");

  const RngStream root(cfg.seed);

  auto volume_stream = root.child(kVolumeTag);
  const PointMatrix draws = uniform_box_sample(mc_box, cfg.n_mc, volume_stream);

  // Replicate 1 fixes both bandwidths for the whole run.
  auto first_stream = root.child(kReplicateTag, 1);
  const PointMatrix first = model_sample(cfg.model, cfg.k + cfg.l, first_stream);
  const PointMatrix first_dk = first.head(cfg.k);
  const double hcv = select_bandwidth(first_dk, cfg.kernel, bandwidth_grid(first_dk));
  const double hcvu = select_bandwidth(first, cfg.kernel, bandwidth_grid(first));

  std::vector<ReplicateRow> rows(cfg.replicates);
  parallel_for(cfg.replicates, [&](std::size_t i) {
    const std::uint64_t r = i + 1;
    auto rep_stream = root.child(kReplicateTag, r);
    const PointMatrix sample = model_sample(cfg.model, cfg.k + cfg.l, rep_stream);
    const PointMatrix dk = sample.head(cfg.k);
    const PointMatrix el = sample.tail(cfg.l);

    auto test_stream = root.child(kTestTag, r);
    const PointMatrix test_pts = uniform_box_sample(test_box, cfg.n_test, test_stream);

    const auto fk_bank = build_bank(dk, hcv, cfg.multipliers, cfg.kernel);
    const auto fn_bank = build_bank(sample, hcvu, cfg.multipliers, cfg.kernel);

    const std::vector<double> reference = mean_density(fn_bank, test_pts);
    const std::vector<double> eps_grid =
        default_eps_grid(reference, cfg.eps_grid_size, cfg.eps_lo_frac, cfg.eps_hi_frac);

    std::vector<DensityFn> bank;
    bank.reserve(fk_bank.size());
    for (const auto& est : fk_bank) bank.push_back(est.as_density());
    const AggregateParams params{eps_grid.front(), cfg.variant, cfg.smooth_kernel, cfg.eta};
    const AggregatedEstimator agg(bank, el, params, mc_box, draws);

    std::vector<double> truth(cfg.n_test);
    for (std::size_t t = 0; t < cfg.n_test; ++t) {
      const auto x = test_pts.row(t);
      truth[t] = model_density(cfg.model, x);
    }

    const EpsilonSelection sel = select_epsilon(agg, reference, test_pts, test_box, eps_grid);

    ReplicateRow row;
    row.eps = sel.epsilon;
    row.degenerate = sel.degenerate[sel.index];
    const std::size_t g_count = eps_grid.size();
    std::vector<double> agg_values(cfg.n_test);
    std::vector<unsigned char> drop(cfg.n_test);
    for (std::size_t t = 0; t < cfg.n_test; ++t) {
      agg_values[t] = sel.values[t * g_count + sel.index];
      drop[t] = sel.flags[t * g_count + sel.index];
    }
    row.agg_error = masked_l2(agg_values, truth, drop, test_box.volume());

    std::vector<double> est_values(cfg.n_test);
    row.fk_errors.resize(fk_bank.size());
    row.fn_errors.resize(fn_bank.size());
    for (std::size_t m = 0; m < fk_bank.size(); ++m) {
      fk_bank[m].eval_many(test_pts, est_values.data());
      row.fk_errors[m] = l2_error(est_values, truth, test_box.volume());
    }
    for (std::size_t m = 0; m < fn_bank.size(); ++m) {
      fn_bank[m].eval_many(test_pts, est_values.data());
      row.fn_errors[m] = l2_error(est_values, truth, test_box.volume());
    }
    rows[i] = std::move(row);
  });

  return ExperimentResult{std::move(rows), hcv, hcvu, test_box, mc_box, cfg.multipliers};
}

double kolmogorov_tail(double t) {
  if (!(t > 0.0)) return 1.0;
  if (t < 1.18) {
    const double pi = std::numbers::pi;
    const double w = std::exp(-pi * pi / (8.0 * t * t));
    const double cdf = std::sqrt(2.0 * pi) / t *
                       (w + std::pow(w, 9.0) + std::pow(w, 25.0) + std::pow(w, 49.0));
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * t * t);
    sum += sign * term;
    if (term < 1e-16) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_test_normal(std::span<const double> sample, double mu, double sd) {
  if (sample.size() < 20)
    throw std::invalid_argument("ks_test_normal: needs at least 20 observations");
  if (!(sd > 0.0)) throw std::invalid_argument("ks_test_normal: sd must be positive");
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d_stat = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = normal_cdf((sorted[i] - mu) / sd);
    const double lo = f - static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n - f;
    d_stat = std::max({d_stat, lo, hi});
  }
  return KsResult{d_stat, kolmogorov_tail(std::sqrt(n) * d_stat)};
}

CltResult run_clt(const CltConfig& cfg) {
  validate(cfg.model);
  check_common(cfg.k, cfg.l, cfg.replicates);
  if (cfg.replicates < 20)
    throw std::invalid_argument("run_clt: needs at least 20 replicates");
  if (cfg.n_mc == 0) throw std::invalid_argument("run_clt: n_mc must be positive");
  const auto* normal = std::get_if<DiagNormal>(&cfg.model);
  if (normal == nullptr)
    throw std::invalid_argument("run_clt: exact neighborhood volume needs a normal model");
  if (cfg.point.size() != model_dim(cfg.model))
    throw std::invalid_argument("run_clt: point dimension mismatch");
  if (!(cfg.curve_bandwidth > 0.0))
    throw std::invalid_argument("run_clt: curve bandwidth must be positive");
  const std::size_t dim = model_dim(cfg.model);
  const BoundingBox mc_box = resolve_box(cfg.mc_box, default_mc_box(cfg.model), dim, "mc box");

  CltResult res;
  res.fx = model_density(cfg.model, cfg.point);
  res.star_volume = spherical_star_volume(*normal, cfg.point, cfg.epsilon);

  const RngStream root(cfg.seed);
  auto first_stream = root.child(kReplicateTag, 1);
  const PointMatrix first = model_sample(cfg.model, cfg.k + cfg.l, first_stream);
  const PointMatrix first_dk = first.head(cfg.k);
  res.hcv = select_bandwidth(first_dk, KernelKind::Gaussian, bandwidth_grid(first_dk));

  const double scale = std::sqrt(res.star_volume * static_cast<double>(cfg.l));

  res.stats.assign(cfg.replicates, 0.0);
  parallel_for(cfg.replicates, [&](std::size_t i) {
    auto rep_stream = root.child(kReplicateTag, i + 1);
    const PointMatrix sample = model_sample(cfg.model, cfg.k + cfg.l, rep_stream);
    const KdeEstimator kde(sample.head(cfg.k), res.hcv, KernelKind::Gaussian);
    std::vector<DensityFn> bank{kde.as_density()};
    const AggregateParams params{cfg.epsilon, Variant::Counting, KernelKind::Indicator, 0.0};
    auto volume_stream = root.child(kVolumeTag, i + 1);
    const PointMatrix draws = uniform_box_sample(mc_box, cfg.n_mc, volume_stream);
    const AggregatedEstimator agg(std::move(bank), sample.tail(cfg.l), params, mc_box, draws);
    res.stats[i] = scale * (agg.eval(cfg.point) - res.fx);
  });

  res.ks = ks_test_normal(res.stats, 0.0, std::sqrt(res.fx));
  res.summary = summarize(res.stats);

  const auto [mn, mx] = std::minmax_element(res.stats.begin(), res.stats.end());
  const double h = cfg.curve_bandwidth;
  const double lo = *mn - 3.0 * h;
  const double hi = *mx + 3.0 * h;
  PointMatrix stat_col(1, res.stats.size());
  for (std::size_t i = 0; i < res.stats.size(); ++i) stat_col.set(i, 0, res.stats[i]);
  const KdeEstimator curve(std::move(stat_col), h, KernelKind::Gaussian);
  const std::size_t curve_n = 256;
  res.curve_x.resize(curve_n);
  res.curve_y.resize(curve_n);
  for (std::size_t i = 0; i < curve_n; ++i) {
    const double x =
        lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(curve_n - 1);
    res.curve_x[i] = x;
    res.curve_y[i] = curve(std::span<const double>(&x, 1));
  }
  return res;
}

}  // namespace levelagg
