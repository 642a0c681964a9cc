#include "levelagg/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace levelagg {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

[[noreturn]] void bad_key(const std::string& key, const std::string& why) {
  throw std::invalid_argument("config: key '" + key + "': " + why);
}

double parse_f64(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &pos);
  } catch (const std::exception&) {
    bad_key(key, "expected a number, got '" + value + "'");
  }
  if (pos != value.size()) bad_key(key, "trailing characters in '" + value + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  if (!value.empty() && value[0] == '-') bad_key(key, "must be nonnegative");
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(value, &pos);
  } catch (const std::exception&) {
    bad_key(key, "expected an unsigned integer, got '" + value + "'");
  }
  if (pos != value.size()) bad_key(key, "trailing characters in '" + value + "'");
  return static_cast<std::uint64_t>(v);
}

std::size_t parse_size(const std::string& key, const std::string& value) {
  const std::uint64_t v = parse_u64(key, value);
  if (v == 0) bad_key(key, "must be positive");
  return static_cast<std::size_t>(v);
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  bad_key(key, "expected true/false, got '" + value + "'");
}

std::vector<double> parse_vec(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) bad_key(key, "empty element in '" + value + "'");
    out.push_back(parse_f64(key, item));
  }
  if (out.empty()) bad_key(key, "expected a comma-separated list");
  return out;
}

std::array<double, 2> parse_vec2(const std::string& key, const std::string& value) {
  const auto v = parse_vec(key, value);
  if (v.size() != 2) bad_key(key, "expected exactly two values");
  return {v[0], v[1]};
}

// "lo1,lo2 ; hi1,hi2"
BoundingBox parse_box(const std::string& key, const std::string& value) {
  const auto semi = value.find(';');
  if (semi == std::string::npos) bad_key(key, "expected 'lower ; upper'");
  const auto lo = parse_vec(key, trim(value.substr(0, semi)));
  const auto hi = parse_vec(key, trim(value.substr(semi + 1)));
  try {
    return BoundingBox(lo, hi);
  } catch (const std::exception& e) {
    bad_key(key, e.what());
  }
}

struct RawEntries {
  std::map<std::string, std::string> kv;

  const std::string* find(const std::string& key) const {
    const auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  }
};

AnalyticModel build_model(const RawEntries& raw, std::vector<std::string>& consumed) {
  const std::string* name = raw.find("model");
  if (name == nullptr) throw std::invalid_argument("config: missing required key 'model'");
  consumed.push_back("model");

  const auto take = [&](const char* sub) -> const std::string* {
    const std::string key = std::string("model.") + sub;
    const std::string* v = raw.find(key);
    if (v != nullptr) consumed.push_back(key);
    return v;
  };

  AnalyticModel model;
  if (*name == "beta_product") {
    BetaProduct m;
    if (const auto* v = take("alpha")) m.alpha = parse_f64("model.alpha", *v);
    if (const auto* v = take("beta")) m.beta = parse_f64("model.beta", *v);
    if (const auto* v = take("d")) m.d = parse_size("model.d", *v);
    model = m;
  } else if (*name == "diag_normal") {
    DiagNormal m;
    if (const auto* v = take("sigma"))
      m.sigma = parse_vec("model.sigma", *v);
    else
      throw std::invalid_argument("config: diag_normal needs model.sigma");
    model = m;
  } else if (*name == "weibull_product") {
    WeibullProduct m;
    if (const auto* v = take("lambda")) m.lambda = parse_f64("model.lambda", *v);
    if (const auto* v = take("shape")) m.k = parse_f64("model.shape", *v);
    if (const auto* v = take("d")) m.d = parse_size("model.d", *v);
    if (const auto* v = take("pooled_exponent"))
      m.pooled_exponent = parse_bool("model.pooled_exponent", *v);
    model = m;
  } else if (*name == "normal_mixture_shared" || *name == "normal_mixture_two") {
    const auto fill = [&](auto& m) {
      if (const auto* v = take("mu1")) m.mu1 = parse_vec2("model.mu1", *v);
      if (const auto* v = take("mu2")) m.mu2 = parse_vec2("model.mu2", *v);
      if (const auto* v = take("sigma1_sq")) m.s1_sq = parse_f64("model.sigma1_sq", *v);
      if (const auto* v = take("sigma2_sq")) m.s2_sq = parse_f64("model.sigma2_sq", *v);
      if (const auto* v = take("rho")) m.rho = parse_f64("model.rho", *v);
    };
    if (*name == "normal_mixture_shared") {
      NormalMixtureSharedCov m;
      fill(m);
      model = m;
    } else {
      NormalMixtureTwoCov m;
      fill(m);
      model = m;
    }
  } else {
    throw std::invalid_argument("config: unknown model '" + *name + "'");
  }
  validate(model);
  return model;
}

void check_variant_combo(Variant variant, KernelKind smooth_kernel, double eta) {
  if (!(eta >= 0.0 && eta < 1.0))
    throw std::invalid_argument("config: eta must lie in [0, 1)");
  const bool eta_variant = variant == Variant::EtaCounting || variant == Variant::EtaSmoothed;
  if (eta > 0.0 && !eta_variant)
    throw std::invalid_argument(
        "config: eta > 0 requires variant eta_counting or eta_smoothed");
  const bool smoothed = variant == Variant::Smoothed || variant == Variant::EtaSmoothed;
  if (smoothed && smooth_kernel == KernelKind::Gaussian)
    throw std::invalid_argument(
        "config: smooth_kernel must vanish outside the unit window "
        "(indicator or epanechnikov)");
}

}  // namespace

Preset parse_preset(const std::string& name) {
  if (name == "desk") return Preset::Desk;
  if (name == "paper") return Preset::Paper;
  throw std::invalid_argument("unknown preset: " + name);
}

ParsedConfig parse_config_text(const std::string& text) {
  RawEntries raw;
  std::stringstream lines(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                  ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                  ": empty key or value");
    if (!raw.kv.emplace(key, value).second)
      throw std::invalid_argument("config: repeated key '" + key + "'");
  }

  std::vector<std::string> consumed;
  ParsedConfig doc;
  doc.model = build_model(raw, consumed);

  const auto take = [&](const char* key) -> const std::string* {
    const std::string* v = raw.find(key);
    if (v != nullptr) consumed.emplace_back(key);
    return v;
  };

  if (const auto* v = take("kernel")) doc.kernel = parse_kernel(*v);
  if (const auto* v = take("variant")) doc.variant = parse_variant(*v);
  if (const auto* v = take("smooth_kernel")) doc.smooth_kernel = parse_kernel(*v);
  if (const auto* v = take("eta")) doc.eta = parse_f64("eta", *v);
  if (const auto* v = take("k")) doc.k = parse_size("k", *v);
  if (const auto* v = take("l")) doc.l = parse_size("l", *v);
  if (const auto* v = take("n_test")) doc.n_test = parse_size("n_test", *v);
  if (const auto* v = take("n_mc")) doc.n_mc = parse_size("n_mc", *v);
  if (const auto* v = take("replicates")) doc.replicates = parse_size("replicates", *v);
  if (const auto* v = take("eps_grid_size")) doc.eps_grid_size = parse_size("eps_grid_size", *v);
  if (const auto* v = take("seed")) doc.seed = parse_u64("seed", *v);
  if (const auto* v = take("multipliers")) doc.multipliers = parse_vec("multipliers", *v);
  if (const auto* v = take("eps_lo")) doc.eps_lo = parse_f64("eps_lo", *v);
  if (const auto* v = take("eps_hi")) doc.eps_hi = parse_f64("eps_hi", *v);
  if (const auto* v = take("test_box")) doc.test_box = parse_box("test_box", *v);
  if (const auto* v = take("mc_box")) doc.mc_box = parse_box("mc_box", *v);
  if (const auto* v = take("point")) doc.point = parse_vec("point", *v);
  if (const auto* v = take("epsilon")) doc.epsilon = parse_f64("epsilon", *v);
  if (const auto* v = take("curve_bandwidth"))
    doc.curve_bandwidth = parse_f64("curve_bandwidth", *v);
  if (const auto* v = take("points_file")) doc.points_file = *v;

  for (const auto& [key, value] : raw.kv)
    if (std::find(consumed.begin(), consumed.end(), key) == consumed.end())
      throw std::invalid_argument("config: unknown key '" + key + "'");

  // Variant/eta/smooth-kernel constraints hold for every command, so a bad
  // combination is rejected here rather than at materialization.
  check_variant_combo(doc.variant.value_or(Variant::Counting),
                      doc.smooth_kernel.value_or(KernelKind::Indicator),
                      doc.eta.value_or(0.0));
  return doc;
}

ParsedConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

namespace {

bool large_dim(const AnalyticModel& model) { return model_dim(model) >= 3; }

}  // namespace

ExperimentConfig make_experiment_config(const ParsedConfig& doc, Preset preset) {
  ExperimentConfig cfg;
  cfg.model = doc.model;
  if (preset == Preset::Paper) {
    const bool big = large_dim(doc.model);
    cfg.k = cfg.l = big ? 4000 : 2000;
    cfg.n_test = big ? 4000 : 2000;
    cfg.n_mc = big ? 40000 : 20000;
    cfg.replicates = 100;
  }
  if (doc.kernel) cfg.kernel = *doc.kernel;
  if (doc.variant) cfg.variant = *doc.variant;
  if (doc.smooth_kernel) cfg.smooth_kernel = *doc.smooth_kernel;
  if (doc.eta) cfg.eta = *doc.eta;
  if (doc.k) cfg.k = *doc.k;
  if (doc.l) cfg.l = *doc.l;
  if (doc.n_test) cfg.n_test = *doc.n_test;
  if (doc.n_mc) cfg.n_mc = *doc.n_mc;
  if (doc.replicates) cfg.replicates = *doc.replicates;
  if (doc.seed) cfg.seed = *doc.seed;
  if (doc.multipliers) cfg.multipliers = *doc.multipliers;
  if (doc.eps_grid_size) cfg.eps_grid_size = *doc.eps_grid_size;
  if (doc.eps_lo) cfg.eps_lo_frac = *doc.eps_lo;
  if (doc.eps_hi) cfg.eps_hi_frac = *doc.eps_hi;
  if (doc.test_box) cfg.test_box = doc.test_box;
  if (doc.mc_box) cfg.mc_box = doc.mc_box;
  check_variant_combo(cfg.variant, cfg.smooth_kernel, cfg.eta);
  if (!(cfg.eps_lo_frac > 0.0) || !(cfg.eps_hi_frac > cfg.eps_lo_frac))
    throw std::invalid_argument("config: need 0 < eps_lo < eps_hi");
  if (cfg.eps_grid_size < 2)
    throw std::invalid_argument("config: eps_grid_size must be at least 2");
  return cfg;
}

CltConfig make_clt_config(const ParsedConfig& doc, Preset preset) {
  if (!std::holds_alternative<DiagNormal>(doc.model))
    throw std::invalid_argument("config: clt needs model = diag_normal");
  CltConfig cfg;
  cfg.model = doc.model;
  if (preset == Preset::Paper) {
    cfg.k = 6000;
    cfg.l = 1000;
    cfg.replicates = 1000;
    // Larger l amplifies the volume-noise term through sqrt(vol * l), so the
    // volume budget grows with the preset to keep that term negligible.
    cfg.n_mc = 100000;
  }
  if (doc.point) cfg.point = *doc.point;
  if (doc.epsilon) cfg.epsilon = *doc.epsilon;
  if (doc.k) cfg.k = *doc.k;
  if (doc.l) cfg.l = *doc.l;
  if (doc.n_mc) cfg.n_mc = *doc.n_mc;
  if (doc.replicates) cfg.replicates = *doc.replicates;
  if (doc.seed) cfg.seed = *doc.seed;
  if (doc.curve_bandwidth) cfg.curve_bandwidth = *doc.curve_bandwidth;
  if (doc.mc_box) cfg.mc_box = *doc.mc_box;
  if (cfg.point.size() != model_dim(cfg.model))
    throw std::invalid_argument("config: point dimension mismatch");
  if (!(cfg.epsilon > 0.0)) throw std::invalid_argument("config: epsilon must be positive");
  return cfg;
}

EstimateConfig make_estimate_config(const ParsedConfig& doc, Preset preset) {
  EstimateConfig cfg;
  cfg.model = doc.model;
  const std::size_t dim = model_dim(doc.model);
  if (preset == Preset::Paper) {
    const bool big = large_dim(doc.model);
    cfg.k = cfg.l = big ? 4000 : 2000;
    cfg.n_mc = big ? 40000 : 20000;
  }
  if (doc.kernel) cfg.kernel = *doc.kernel;
  if (doc.variant) cfg.variant = *doc.variant;
  if (doc.smooth_kernel) cfg.smooth_kernel = *doc.smooth_kernel;
  if (doc.eta) cfg.eta = *doc.eta;
  if (doc.k) cfg.k = *doc.k;
  if (doc.l) cfg.l = *doc.l;
  if (doc.n_mc) cfg.n_mc = *doc.n_mc;
  if (doc.seed) cfg.seed = *doc.seed;
  if (doc.multipliers) cfg.multipliers = *doc.multipliers;
  if (doc.epsilon) cfg.epsilon = *doc.epsilon;
  if (doc.mc_box) cfg.mc_box = doc.mc_box;
  check_variant_combo(cfg.variant, cfg.smooth_kernel, cfg.eta);
  if (!(cfg.epsilon > 0.0)) throw std::invalid_argument("config: epsilon must be positive");

  if (doc.point && doc.points_file)
    throw std::invalid_argument("config: give either point or points_file, not both");
  if (doc.points_file) {
    cfg.points = load_points_csv(*doc.points_file, dim);
  } else if (doc.point) {
    if (doc.point->size() != dim)
      throw std::invalid_argument("config: point dimension mismatch");
    cfg.points = PointMatrix::from_rows(dim, *doc.point);
  } else {
    throw std::invalid_argument("config: estimate needs point or points_file");
  }
  return cfg;
}

VolumeConfig make_volume_config(const ParsedConfig& doc, Preset) {
  VolumeConfig cfg;
  cfg.model = doc.model;
  const std::size_t dim = model_dim(doc.model);
  cfg.point.assign(dim, 0.5);
  if (doc.point) {
    if (doc.point->size() != dim)
      throw std::invalid_argument("config: point dimension mismatch");
    cfg.point = *doc.point;
  }
  if (doc.epsilon) cfg.epsilon = *doc.epsilon;
  if (doc.n_mc) cfg.n_mc = *doc.n_mc;
  if (doc.seed) cfg.seed = *doc.seed;
  if (doc.mc_box) cfg.mc_box = doc.mc_box;
  if (!(cfg.epsilon > 0.0)) throw std::invalid_argument("config: epsilon must be positive");
  return cfg;
}

PointMatrix load_points_csv(const std::string& path, std::size_t dim) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("points: cannot open '" + path + "'");
  std::vector<double> flat;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto row = parse_vec("points row " + std::to_string(line_no), line);
    if (row.size() != dim)
      throw std::invalid_argument("points: row " + std::to_string(line_no) + " has " +
                                  std::to_string(row.size()) + " values, expected " +
                                  std::to_string(dim));
    flat.insert(flat.end(), row.begin(), row.end());
  }
  if (flat.empty()) throw std::invalid_argument("points: no rows in '" + path + "'");
  return PointMatrix::from_rows(dim, flat);
}

}  // namespace levelagg
