#include "levelagg/models.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace levelagg {

namespace {

constexpr double PI = std::numbers::pi;

struct Chol2 {
  double l11, l21, l22;
};

Chol2 cholesky2(double a11, double a12, double a22) {
  const double l11 = std::sqrt(a11);
  const double l21 = a12 / l11;
  const double l22 = std::sqrt(a22 - l21 * l21);
  return {l11, l21, l22};
}

double binormal_density(const std::array<double, 2>& mu, double a11, double a12, double a22,
                        std::span<const double> x) {
  const double det = a11 * a22 - a12 * a12;
  const double dx = x[0] - mu[0];
  const double dy = x[1] - mu[1];
  const double quad = (a22 * dx * dx - 2.0 * a12 * dx * dy + a11 * dy * dy) / det;
  return std::exp(-0.5 * quad) / (2.0 * PI * std::sqrt(det));
}

void check_mixture(double s1_sq, double s2_sq, double rho) {
  if (!(s1_sq > 0.0) || !(s2_sq > 0.0))
    throw std::invalid_argument("mixture: variances must be positive");
  if (!(std::fabs(rho) < std::sqrt(s1_sq * s2_sq)))
    throw std::invalid_argument("mixture: |rho| must stay below sigma1*sigma2");
}

double weibull_upper(double lambda, double k) {
  // marginal 0.999 quantile, wide enough for a fallback evaluation box
  return lambda * std::pow(-std::log(1e-3), 1.0 / k);
}

}  // namespace

void validate(const AnalyticModel& model) {
  std::visit(
      [](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, BetaProduct>) {
          if (!(m.alpha > 0.0) || !(m.beta > 0.0))
            throw std::invalid_argument("beta_product: shape parameters must be positive");
          if (m.d == 0) throw std::invalid_argument("beta_product: dimension must be positive");
        } else if constexpr (std::is_same_v<T, DiagNormal>) {
          if (m.sigma.empty())
            throw std::invalid_argument("diag_normal: needs at least one sigma");
          for (double s : m.sigma)
            if (!(s > 0.0)) throw std::invalid_argument("diag_normal: sigma must be positive");
        } else if constexpr (std::is_same_v<T, WeibullProduct>) {
          if (!(m.lambda > 0.0) || !(m.k > 0.0))
            throw std::invalid_argument("weibull_product: lambda and k must be positive");
          if (m.d == 0)
            throw std::invalid_argument("weibull_product: dimension must be positive");
        } else {
          check_mixture(m.s1_sq, m.s2_sq, m.rho);
        }
      },
      model);
}

std::size_t model_dim(const AnalyticModel& model) {
  return std::visit(
      [](const auto& m) -> std::size_t {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, BetaProduct>) return m.d;
        else if constexpr (std::is_same_v<T, DiagNormal>) return m.sigma.size();
        else if constexpr (std::is_same_v<T, WeibullProduct>) return m.d;
        else return 2;
      },
      model);
}

std::string describe(const AnalyticModel& model) {
  std::ostringstream out;
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, BetaProduct>) {
          out << "beta_product(alpha=" << m.alpha << ", beta=" << m.beta << ", d=" << m.d << ")";
        } else if constexpr (std::is_same_v<T, DiagNormal>) {
          out << "diag_normal(sigma=";
          for (std::size_t c = 0; c < m.sigma.size(); ++c)
            out << (c ? "," : "") << m.sigma[c];
          out << ")";
        } else if constexpr (std::is_same_v<T, WeibullProduct>) {
          out << "weibull_product(lambda=" << m.lambda << ", k=" << m.k << ", d=" << m.d << ")";
        } else if constexpr (std::is_same_v<T, NormalMixtureSharedCov>) {
          out << "normal_mixture_shared(s1_sq=" << m.s1_sq << ", s2_sq=" << m.s2_sq
              << ", rho=" << m.rho << ")";
        } else {
          out << "normal_mixture_two(s1_sq=" << m.s1_sq << ", s2_sq=" << m.s2_sq
              << ", rho=" << m.rho << ")";
        }
      },
      model);
  return out.str();
}

double model_density(const AnalyticModel& model, std::span<const double> x) {
  if (x.size() != model_dim(model))
    throw std::invalid_argument("model_density: dimension mismatch");
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, BetaProduct>) {
          const double log_norm =
              std::lgamma(m.alpha + m.beta) - std::lgamma(m.alpha) - std::lgamma(m.beta);
          double dens = 1.0;
          for (double v : x) {
            if (v <= 0.0 || v >= 1.0) return 0.0;
            dens *= std::exp(log_norm) * std::pow(v, m.alpha - 1.0) *
                    std::pow(1.0 - v, m.beta - 1.0);
          }
          return dens;
        } else if constexpr (std::is_same_v<T, DiagNormal>) {
          double dens = 1.0;
          for (std::size_t c = 0; c < m.sigma.size(); ++c) {
            const double z = x[c] / m.sigma[c];
            dens *= std::exp(-0.5 * z * z) / (m.sigma[c] * std::sqrt(2.0 * PI));
          }
          return dens;
        } else if constexpr (std::is_same_v<T, WeibullProduct>) {
          double sum = 0.0;
          double prod_x = 1.0;
          for (double v : x) {
            if (v < 0.0) return 0.0;
            sum += std::pow(v / m.lambda, m.k);
            prod_x *= v;
          }
          const double dd = static_cast<double>(m.d);
          const double expo = m.pooled_exponent ? dd * (m.k - 1.0) : m.k - 1.0;
          return std::pow(m.k / std::pow(m.lambda, m.k), dd) * std::pow(prod_x, expo) *
                 std::exp(-sum);
        } else if constexpr (std::is_same_v<T, NormalMixtureSharedCov>) {
          return 0.5 * binormal_density(m.mu1, m.s1_sq, m.rho, m.s2_sq, x) +
                 0.5 * binormal_density(m.mu2, m.s1_sq, m.rho, m.s2_sq, x);
        } else {
          return 0.5 * binormal_density(m.mu1, m.s1_sq, m.rho, m.s2_sq, x) +
                 0.5 * binormal_density(m.mu2, m.s2_sq, -m.rho, m.s1_sq, x);
        }
      },
      model);
}

DensityFn model_density_fn(const AnalyticModel& model) {
  AnalyticModel copy = model;
  return [copy](std::span<const double> x) { return model_density(copy, x); };
}

PointMatrix model_sample(const AnalyticModel& model, std::size_t n, RngStream& stream) {
  validate(model);
  const std::size_t d = model_dim(model);
  PointMatrix out(d, n);
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, BetaProduct>) {
          for (std::size_t i = 0; i < n; ++i)
            for (std::size_t c = 0; c < d; ++c) {
              const double g1 = stream.gamma(m.alpha);
              const double g2 = stream.gamma(m.beta);
              out.set(i, c, g1 / (g1 + g2));
            }
        } else if constexpr (std::is_same_v<T, DiagNormal>) {
          for (std::size_t i = 0; i < n; ++i)
            for (std::size_t c = 0; c < d; ++c) out.set(i, c, m.sigma[c] * stream.normal());
        } else if constexpr (std::is_same_v<T, WeibullProduct>) {
          for (std::size_t i = 0; i < n; ++i)
            for (std::size_t c = 0; c < d; ++c) {
              const double u = stream.uniform_pos();
              out.set(i, c, m.lambda * std::pow(-std::log(u), 1.0 / m.k));
            }
        } else if constexpr (std::is_same_v<T, NormalMixtureSharedCov>) {
          const Chol2 L = cholesky2(m.s1_sq, m.rho, m.s2_sq);
          for (std::size_t i = 0; i < n; ++i) {
            const bool first = stream.uniform() < 0.5;
            const auto& mu = first ? m.mu1 : m.mu2;
            const double z1 = stream.normal();
            const double z2 = stream.normal();
            out.set(i, 0, mu[0] + L.l11 * z1);
            out.set(i, 1, mu[1] + L.l21 * z1 + L.l22 * z2);
          }
        } else {
          const Chol2 L1 = cholesky2(m.s1_sq, m.rho, m.s2_sq);
          const Chol2 L2 = cholesky2(m.s2_sq, -m.rho, m.s1_sq);
          for (std::size_t i = 0; i < n; ++i) {
            const bool first = stream.uniform() < 0.5;
            const auto& mu = first ? m.mu1 : m.mu2;
            const Chol2& L = first ? L1 : L2;
            const double z1 = stream.normal();
            const double z2 = stream.normal();
            out.set(i, 0, mu[0] + L.l11 * z1);
            out.set(i, 1, mu[1] + L.l21 * z1 + L.l22 * z2);
          }
        }
      },
      model);
  return out;
}

double unit_ball_volume(std::size_t d) {
  const double dd = static_cast<double>(d);
  return std::pow(PI, 0.5 * dd) / std::tgamma(0.5 * dd + 1.0);
}

namespace {

double isotropic_sigma(const DiagNormal& model) {
  validate(AnalyticModel{model});
  const double s = model.sigma.front();
  for (double v : model.sigma)
    if (std::fabs(v - s) > 1e-12 * s)
      throw std::invalid_argument("spherical volume: sigma must be isotropic");
  return s;
}

}  // namespace

double spherical_volume_rate(const DiagNormal& model, std::span<const double> x) {
  const double s = isotropic_sigma(model);
  const std::size_t d = model.sigma.size();
  if (x.size() != d) throw std::invalid_argument("spherical_volume_rate: dimension mismatch");
  double norm_sq = 0.0;
  for (double v : x) norm_sq += v * v;
  const double norm = std::sqrt(norm_sq);
  if (!(norm > 0.0))
    throw std::invalid_argument("spherical_volume_rate: gradient vanishes at the origin");
  const double fx = model_density(AnalyticModel{model}, x);
  const double grad_norm = norm * fx / (s * s);
  const double dd = static_cast<double>(d);
  return 2.0 * std::pow(PI, 0.5 * dd) * std::pow(norm, dd - 1.0) /
         (std::tgamma(0.5 * dd) * grad_norm);
}

double spherical_star_volume(const DiagNormal& model, std::span<const double> x, double eps) {
  const double s = isotropic_sigma(model);
  const std::size_t d = model.sigma.size();
  if (x.size() != d) throw std::invalid_argument("spherical_star_volume: dimension mismatch");
  if (!(eps > 0.0)) throw std::invalid_argument("spherical_star_volume: epsilon must be positive");
  const double fx = model_density(AnalyticModel{model}, x);
  if (!(eps < fx))
    throw std::invalid_argument("spherical_star_volume: unbounded set, needs eps < f(x)");
  const double dd = static_cast<double>(d);
  const double peak = std::pow(2.0 * PI * s * s, -0.5 * dd);
  // level radius r(g): f(r) = g along ||y|| = r
  const double hi = fx + eps;
  const double r_out_sq = -2.0 * s * s * std::log((fx - eps) / peak);
  const double r_in_sq = hi >= peak ? 0.0 : -2.0 * s * s * std::log(hi / peak);
  return unit_ball_volume(d) *
         (std::pow(r_out_sq, 0.5 * dd) - std::pow(r_in_sq, 0.5 * dd));
}

BoundingBox default_test_box(const AnalyticModel& model) {
  validate(model);
  return std::visit(
      [](const auto& m) -> BoundingBox {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, BetaProduct>) {
          return BoundingBox(std::vector<double>(m.d, 0.0), std::vector<double>(m.d, 1.0));
        } else if constexpr (std::is_same_v<T, DiagNormal>) {
          std::vector<double> lo(m.sigma.size()), hi(m.sigma.size());
          for (std::size_t c = 0; c < m.sigma.size(); ++c) {
            lo[c] = -4.0 * m.sigma[c];
            hi[c] = 4.0 * m.sigma[c];
          }
          return BoundingBox(std::move(lo), std::move(hi));
        } else if constexpr (std::is_same_v<T, WeibullProduct>) {
          return BoundingBox(std::vector<double>(m.d, 0.0),
                             std::vector<double>(m.d, weibull_upper(m.lambda, m.k)));
        } else if constexpr (std::is_same_v<T, NormalMixtureSharedCov>) {
          return BoundingBox({-1.0, -1.0}, {1.0, 1.0});
        } else {
          return BoundingBox({-2.0, -2.0}, {2.0, 2.0});
        }
      },
      model);
}

BoundingBox default_mc_box(const AnalyticModel& model) {
  if (std::holds_alternative<NormalMixtureSharedCov>(model) ||
      std::holds_alternative<NormalMixtureTwoCov>(model)) {
    validate(model);
    return BoundingBox({-2.0, -2.0}, {2.0, 2.0});
  }
  return default_test_box(model);
}

}  // namespace levelagg
