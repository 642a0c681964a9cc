#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "levelagg/config.hpp"
#include "levelagg/csv.hpp"
#include "levelagg/neighborhood.hpp"
#include "levelagg/parallel.hpp"

namespace {

using namespace levelagg;

struct CommonArgs {
  std::string config;
  std::string out = ".";
  std::string preset = "desk";
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
};

void add_common(CLI::App* sub, CommonArgs& args) {
  sub->add_option("--config", args.config, "config file (key = value lines)")->required();
  sub->add_option("--seed", args.seed, "override the config's master seed");
  sub->add_option("--out", args.out, "output directory");
  sub->add_option("--preset", args.preset, "parameter scale: desk or paper")
      ->check(CLI::IsMember({"desk", "paper"}));
  sub->add_option("--threads", args.threads, "worker threads, 0 = hardware");
}

std::string out_path(const CommonArgs& args, const char* name) {
  return (std::filesystem::path(args.out) / name).string();
}

ParsedConfig load(const CommonArgs& args) {
  set_thread_count(args.threads);
  return parse_config_file(args.config);
}

int run_simulate(const CommonArgs& args) {
  const ParsedConfig doc = load(args);
  ExperimentConfig cfg = make_experiment_config(doc, parse_preset(args.preset));
  if (args.seed) cfg.seed = *args.seed;
  const ExperimentResult res = run_experiment(cfg);
  const std::string path = out_path(args, "experiment.csv");
  write_file(path, experiment_csv(res));

  std::vector<double> agg(res.rows.size());
  for (std::size_t i = 0; i < res.rows.size(); ++i) agg[i] = res.rows[i].agg_error;
  std::cout << describe(cfg.model) << ": " << res.rows.size()
            << " replicates, mean aggregated L2 " << format_g6(mean(agg)) << "\n"
            << "wrote " << path << "\n";
  return 0;
}

int run_clt_cmd(const CommonArgs& args) {
  const ParsedConfig doc = load(args);
  CltConfig cfg = make_clt_config(doc, parse_preset(args.preset));
  if (args.seed) cfg.seed = *args.seed;
  const CltResult res = run_clt(cfg);
  const std::string path = out_path(args, "clt.csv");
  const std::string curve_path = out_path(args, "clt_curve.csv");
  write_file(path, clt_csv(res));
  write_file(curve_path, clt_curve_csv(res));
  std::cout << "statistic mean " << format_g6(res.summary.mean) << ", variance "
            << format_g6(res.summary.var) << " (target " << format_g6(res.fx) << "), KS p "
            << format_g6(res.ks.p_value) << "\n"
            << "wrote " << path << " and " << curve_path << "\n";
  return 0;
}

int run_estimate(const CommonArgs& args) {
  const ParsedConfig doc = load(args);
  EstimateConfig cfg = make_estimate_config(doc, parse_preset(args.preset));
  if (args.seed) cfg.seed = *args.seed;

  const RngStream root(cfg.seed);
  auto rep_stream = root.child(kReplicateTag, 1);
  const PointMatrix sample = model_sample(cfg.model, cfg.k + cfg.l, rep_stream);
  const PointMatrix dk = sample.head(cfg.k);
  const double hcv = select_bandwidth(dk, cfg.kernel, bandwidth_grid(dk));
  const auto kde_bank = build_bank(dk, hcv, cfg.multipliers, cfg.kernel);
  std::vector<DensityFn> bank;
  for (const auto& est : kde_bank) bank.push_back(est.as_density());

  const BoundingBox mc_box = cfg.mc_box.value_or(default_mc_box(cfg.model));
  const AggregateParams params{cfg.epsilon, cfg.variant, cfg.smooth_kernel, cfg.eta};
  const AggregatedEstimator agg(std::move(bank), sample.tail(cfg.l), params, mc_box, cfg.n_mc,
                                root.child(kVolumeTag));

  std::vector<double> values(cfg.points.size());
  std::vector<unsigned char> degenerate(cfg.points.size());
  const std::span<const double> eps(&params.epsilon, 1);
  for (std::size_t i = 0; i < cfg.points.size(); ++i) {
    const auto x = cfg.points.row(i);
    agg.eval_grid(agg.bank_values(x), eps, &values[i], &degenerate[i]);
  }
  const std::string path = out_path(args, "estimate.csv");
  write_file(path, estimate_csv(cfg.points, values, degenerate));
  for (std::size_t i = 0; i < cfg.points.size(); ++i) {
    for (std::size_t c = 0; c < cfg.points.dim(); ++c)
      std::cout << (c ? "," : "") << format_g6(cfg.points.get(i, c));
    std::cout << " -> " << (degenerate[i] ? "nan" : format_g6(values[i])) << "\n";
  }
  std::cout << "wrote " << path << "\n";
  return 0;
}

int run_volume(const CommonArgs& args) {
  const ParsedConfig doc = load(args);
  VolumeConfig cfg = make_volume_config(doc, parse_preset(args.preset));
  if (args.seed) cfg.seed = *args.seed;
  const auto* normal = std::get_if<DiagNormal>(&cfg.model);
  if (normal == nullptr)
    throw std::invalid_argument("volume: needs model = diag_normal");

  const DensityFn f = model_density_fn(cfg.model);
  const std::vector<double> x = cfg.point;
  const BoundingBox box = cfg.mc_box.value_or(default_mc_box(cfg.model));
  const RngStream root(cfg.seed);
  const McVolume mc =
      mc_volume([&](std::span<const double> y) { return star_member(f, cfg.epsilon, x, y); },
                box, cfg.n_mc, root.child(kVolumeTag));
  const double rate = spherical_volume_rate(*normal, x);
  const double exact = spherical_star_volume(*normal, x, cfg.epsilon);
  std::cout << "mc star volume " << format_g6(mc.volume) << " (" << mc.hits << " of "
            << mc.draws << " draws)\n"
            << "rate x 2eps    " << format_g6(rate * 2.0 * cfg.epsilon) << "\n"
            << "exact annulus  " << format_g6(exact) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"density estimation by aggregated level-set neighborhoods"};
  app.require_subcommand(1);

  CommonArgs estimate_args, simulate_args, clt_args, volume_args;
  CLI::App* estimate =
      app.add_subcommand("estimate", "evaluate the aggregated estimator at given points");
  add_common(estimate, estimate_args);
  CLI::App* simulate =
      app.add_subcommand("simulate", "replicated L2-error comparison against the bank");
  add_common(simulate, simulate_args);
  CLI::App* clt = app.add_subcommand("clt", "standardized-statistic replication harness");
  add_common(clt, clt_args);
  CLI::App* volume =
      app.add_subcommand("volume", "level-set neighborhood volume: MC vs closed forms");
  add_common(volume, volume_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (estimate->parsed()) return run_estimate(estimate_args);
    if (simulate->parsed()) return run_simulate(simulate_args);
    if (clt->parsed()) return run_clt_cmd(clt_args);
    if (volume->parsed()) return run_volume(volume_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
