#pragma once

#include <optional>
#include <string>
#include <vector>

#include "levelagg/experiments.hpp"

namespace levelagg {

enum class Preset { Desk, Paper };

Preset parse_preset(const std::string& name);

//! Typed view of a key=value config document. Every key is parsed and
//! schema-checked up front; unknown keys and repeated keys are hard errors.
//! Keys a command does not consume are simply ignored by its materializer,
//! so one document can drive several commands.
struct ParsedConfig {
  AnalyticModel model;
  std::optional<KernelKind> kernel;
  std::optional<Variant> variant;
  std::optional<KernelKind> smooth_kernel;
  std::optional<double> eta;
  std::optional<std::size_t> k, l, n_test, n_mc, replicates, eps_grid_size;
  std::optional<std::uint64_t> seed;
  std::optional<std::vector<double>> multipliers;
  std::optional<double> eps_lo, eps_hi;
  std::optional<BoundingBox> test_box, mc_box;
  std::optional<std::vector<double>> point;
  std::optional<double> epsilon;
  std::optional<double> curve_bandwidth;
  std::optional<std::string> points_file;
};

//! Parse a document: '#' comments, blank lines, and key = value entries,
//! model parameters under the single nesting level "model.".
ParsedConfig parse_config_text(const std::string& text);

//! parse_config_text over a file's contents.
ParsedConfig parse_config_file(const std::string& path);

struct EstimateConfig {
  AnalyticModel model;
  KernelKind kernel = KernelKind::Gaussian;
  Variant variant = Variant::Counting;
  KernelKind smooth_kernel = KernelKind::Indicator;
  double eta = 0.0;
  std::size_t k = 500;
  std::size_t l = 500;
  std::size_t n_mc = 10000;
  std::uint64_t seed = 1;
  std::vector<double> multipliers = {0.9, 0.95, 1.0, 1.05, 1.1};
  double epsilon = 0.005;
  PointMatrix points;
  std::optional<BoundingBox> mc_box;
};

struct VolumeConfig {
  AnalyticModel model;
  std::vector<double> point = {0.5, 0.5};
  double epsilon = 0.005;
  std::size_t n_mc = 400000;
  std::uint64_t seed = 1;
  std::optional<BoundingBox> mc_box;
};

//! Materializers: preset defaults first (scaled by the model dimension where
//! applicable), then the document's explicit keys on top.
ExperimentConfig make_experiment_config(const ParsedConfig& doc, Preset preset);
CltConfig make_clt_config(const ParsedConfig& doc, Preset preset);
EstimateConfig make_estimate_config(const ParsedConfig& doc, Preset preset);
VolumeConfig make_volume_config(const ParsedConfig& doc, Preset preset);

//! Rows of dim comma-separated values; '#' comments and blank lines allowed.
PointMatrix load_points_csv(const std::string& path, std::size_t dim);

}  // namespace levelagg
