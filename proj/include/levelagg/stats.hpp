#pragma once

#include <span>
#include <vector>

namespace levelagg {

//! Linear-interpolation quantile (R type 7) over ascending values.
double quantile_sorted(std::span<const double> sorted, double p);

//! Same, over unsorted values.
double quantile(std::span<const double> values, double p);

double mean(std::span<const double> values);

//! Sample variance, n-1 denominator.
double sample_variance(std::span<const double> values);

struct SevenNumber {
  double min, q1, median, mean, var, q3, max;
};

SevenNumber summarize(std::span<const double> values);

}  // namespace levelagg
