#include "levelagg/neighborhood.hpp"

#include <cmath>
#include <stdexcept>

namespace levelagg {

void validate(const NeighborhoodSpec& spec) {
  if (spec.bank.empty()) throw std::invalid_argument("neighborhood: empty density bank");
  if (!(spec.epsilon > 0.0)) throw std::invalid_argument("neighborhood: epsilon must be positive");
  if (!(spec.eta >= 0.0 && spec.eta < 1.0))
    throw std::invalid_argument("neighborhood: eta must lie in [0, 1)");
}

double eta_required(std::size_t bank_size, double eta) {
  return static_cast<double>(bank_size) * (1.0 - eta);
}

bool member(const NeighborhoodSpec& spec, std::span<const double> x, std::span<const double> y) {
  validate(spec);
  double hits = 0.0;
  for (const auto& f : spec.bank)
    if (std::fabs(f(x) - f(y)) < spec.epsilon) hits += 1.0;
  return hits >= eta_required(spec.bank.size(), spec.eta);
}

bool star_member(const DensityFn& f, double eps, std::span<const double> x,
                 std::span<const double> y) {
  if (!(eps > 0.0)) throw std::invalid_argument("star_member: epsilon must be positive");
  return std::fabs(f(x) - f(y)) < eps;
}

McVolume mc_volume(const std::function<bool(std::span<const double>)>& pred,
                   const BoundingBox& box, std::size_t n, RngStream stream) {
  if (box.empty()) throw std::invalid_argument("mc_volume: empty box");
  if (n == 0) throw std::invalid_argument("mc_volume: needs at least one draw");
  std::vector<double> y(box.dim());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < box.dim(); ++c)
      y[c] = box.lower[c] + (box.upper[c] - box.lower[c]) * stream.uniform();
    if (pred(y)) ++hits;
  }
  McVolume out;
  out.hits = hits;
  out.draws = n;
  out.volume = box.volume() * (static_cast<double>(hits) / static_cast<double>(n));
  return out;
}

PointMatrix uniform_box_sample(const BoundingBox& box, std::size_t n, RngStream& stream) {
  if (box.empty()) throw std::invalid_argument("uniform_box_sample: empty box");
  PointMatrix out(box.dim(), n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < box.dim(); ++c)
      out.set(i, c, box.lower[c] + (box.upper[c] - box.lower[c]) * stream.uniform());
  return out;
}

}  // namespace levelagg
