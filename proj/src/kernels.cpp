#include "levelagg/kernels.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace levelagg {

double kernel_eval_1d(KernelKind kind, double u) {
  switch (kind) {
    case KernelKind::Gaussian:
      return std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
    case KernelKind::Epanechnikov: {
      const double t = 1.0 - u * u;
      return t > 0.0 ? 0.75 * t : 0.0;
    }
    case KernelKind::Indicator:
      return std::fabs(u) < 1.0 ? 1.0 : 0.0;
  }
  throw std::invalid_argument("kernel_eval_1d: unknown kernel");
}

double kernel_product(KernelKind kind, std::span<const double> u) {
  double prod = 1.0;
  for (double v : u) {
    prod *= kernel_eval_1d(kind, v);
    if (prod == 0.0) break;
  }
  return prod;
}

double smooth_weight(KernelKind kind, double u) {
  switch (kind) {
    case KernelKind::Indicator:
      return std::fabs(u) < 1.0 ? 1.0 : 0.0;
    case KernelKind::Epanechnikov: {
      const double t = 1.0 - u * u;
      return t > 0.0 ? t : 0.0;
    }
    case KernelKind::Gaussian:
      break;
  }
  throw std::invalid_argument("smooth_weight: weight must vanish outside |u| < 1");
}

KernelKind parse_kernel(const std::string& name) {
  if (name == "gaussian") return KernelKind::Gaussian;
  if (name == "epanechnikov") return KernelKind::Epanechnikov;
  if (name == "indicator") return KernelKind::Indicator;
  throw std::invalid_argument("unknown kernel: " + name);
}

const char* kernel_name(KernelKind kind) {
  switch (kind) {
    case KernelKind::Gaussian:
      return "gaussian";
    case KernelKind::Epanechnikov:
      return "epanechnikov";
    case KernelKind::Indicator:
      return "indicator";
  }
  return "?";
}

}  // namespace levelagg
