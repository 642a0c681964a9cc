#pragma once

#include <span>
#include <string>

#include "levelagg/experiments.hpp"
#include "levelagg/points.hpp"

namespace levelagg {

//! Shortest-faithful numeric formatting shared by every emitter; output
//! bytes must not depend on locale or worker count.
std::string format_g6(double v);

//! Per-replicate rows (replicate, eps, f_agg, f_k_g*, f_n_g*) followed by a
//! labeled summary block (mean, sd, min, q1, median, q3, max per column).
std::string experiment_csv(const ExperimentResult& res);

//! Per-replicate statistic rows, then the seven-number summary as a second
//! header plus one row.
std::string clt_csv(const CltResult& res);

//! Smoothed density of the statistic samples, (x, density) rows.
std::string clt_curve_csv(const CltResult& res);

//! Query coordinates and the aggregated estimate; degenerate points print nan.
std::string estimate_csv(const PointMatrix& points, std::span<const double> values,
                         std::span<const unsigned char> degenerate);

void write_file(const std::string& path, const std::string& content);

}  // namespace levelagg
