#include "levelagg/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "levelagg/stats.hpp"

namespace levelagg {

std::string format_g6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

namespace {

void append_row(std::string& out, const std::string& label, std::span<const double> values) {
  out += label;
  for (double v : values) {
    out += ',';
    out += format_g6(v);
  }
  out += '\n';
}

double safe_sd(std::span<const double> values) {
  if (values.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  return std::sqrt(sample_variance(values));
}

}  // namespace

std::string experiment_csv(const ExperimentResult& res) {
  if (res.rows.empty()) throw std::invalid_argument("experiment_csv: no rows");
  const std::size_t m = res.multipliers.size();

  std::string out = "replicate,eps,f_agg";
  for (std::size_t g = 1; g <= m; ++g) out += ",f_k_g" + std::to_string(g);
  for (std::size_t g = 1; g <= m; ++g) out += ",f_n_g" + std::to_string(g);
  out += '\n';

  // column-major copy for the summary block
  const std::size_t cols = 2 + 2 * m;
  std::vector<std::vector<double>> col(cols);
  for (auto& c : col) c.reserve(res.rows.size());

  std::vector<double> row_vals(cols);
  for (std::size_t r = 0; r < res.rows.size(); ++r) {
    const ReplicateRow& row = res.rows[r];
    if (row.fk_errors.size() != m || row.fn_errors.size() != m)
      throw std::invalid_argument("experiment_csv: ragged row");
    row_vals[0] = row.eps;
    row_vals[1] = row.agg_error;
    for (std::size_t g = 0; g < m; ++g) row_vals[2 + g] = row.fk_errors[g];
    for (std::size_t g = 0; g < m; ++g) row_vals[2 + m + g] = row.fn_errors[g];
    for (std::size_t c = 0; c < cols; ++c) col[c].push_back(row_vals[c]);
    append_row(out, std::to_string(r + 1), row_vals);
  }

  const auto stat_row = [&](const char* label, auto fn) {
    std::vector<double> vals(cols);
    for (std::size_t c = 0; c < cols; ++c) vals[c] = fn(col[c]);
    append_row(out, label, vals);
  };
  stat_row("mean", [](std::span<const double> v) { return mean(v); });
  stat_row("sd", [](std::span<const double> v) { return safe_sd(v); });
  stat_row("min", [](std::span<const double> v) { return quantile(v, 0.0); });
  stat_row("q1", [](std::span<const double> v) { return quantile(v, 0.25); });
  stat_row("median", [](std::span<const double> v) { return quantile(v, 0.5); });
  stat_row("q3", [](std::span<const double> v) { return quantile(v, 0.75); });
  stat_row("max", [](std::span<const double> v) { return quantile(v, 1.0); });
  return out;
}

std::string clt_csv(const CltResult& res) {
  if (res.stats.empty()) throw std::invalid_argument("clt_csv: no statistics");
  std::string out = "replicate,stat\n";
  for (std::size_t i = 0; i < res.stats.size(); ++i) {
    out += std::to_string(i + 1);
    out += ',';
    out += format_g6(res.stats[i]);
    out += '\n';
  }
  out += "Min,1stQu,Median,Mean,Var,3rdQu,Max\n";
  const SevenNumber& s = res.summary;
  const double vals[] = {s.min, s.q1, s.median, s.mean, s.var, s.q3, s.max};
  for (std::size_t i = 0; i < 7; ++i) {
    if (i) out += ',';
    out += format_g6(vals[i]);
  }
  out += '\n';
  return out;
}

std::string clt_curve_csv(const CltResult& res) {
  if (res.curve_x.size() != res.curve_y.size() || res.curve_x.empty())
    throw std::invalid_argument("clt_curve_csv: bad curve");
  std::string out = "x,density\n";
  for (std::size_t i = 0; i < res.curve_x.size(); ++i) {
    out += format_g6(res.curve_x[i]);
    out += ',';
    out += format_g6(res.curve_y[i]);
    out += '\n';
  }
  return out;
}

std::string estimate_csv(const PointMatrix& points, std::span<const double> values,
                         std::span<const unsigned char> degenerate) {
  if (points.size() != values.size() || points.size() != degenerate.size())
    throw std::invalid_argument("estimate_csv: length mismatch");
  std::string out;
  for (std::size_t c = 1; c <= points.dim(); ++c) {
    if (c > 1) out += ',';
    out += "x" + std::to_string(c);
  }
  out += ",f_agg\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t c = 0; c < points.dim(); ++c) {
      if (c) out += ',';
      out += format_g6(points.get(i, c));
    }
    out += ',';
    out += degenerate[i] ? "nan" : format_g6(values[i]);
    out += '\n';
  }
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace levelagg
