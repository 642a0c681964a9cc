#pragma once

#include <span>
#include <string>

namespace levelagg {

enum class KernelKind { Gaussian, Epanechnikov, Indicator };

//! One-dimensional kernel value. Gaussian and Epanechnikov integrate to 1;
//! the indicator is the unit window 1[|u|<1] (so its value at 0 is 1).
double kernel_eval_1d(KernelKind kind, double u);

//! Product kernel over the coordinates of u.
double kernel_product(KernelKind kind, std::span<const double> u);

//! Weight used when smoothing scaled density differences: the unit window,
//! or the parabolic window rescaled so the weight at 0 is 1. Both vanish
//! outside |u| < 1; the Gaussian is rejected here.
double smooth_weight(KernelKind kind, double u);

KernelKind parse_kernel(const std::string& name);
const char* kernel_name(KernelKind kind);

}  // namespace levelagg
