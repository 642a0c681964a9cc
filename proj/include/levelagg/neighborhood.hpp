#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "levelagg/kde.hpp"
#include "levelagg/points.hpp"
#include "levelagg/rng.hpp"

namespace levelagg {

//! Level-set neighborhood of x: points y whose density-bank values all (or,
//! with eta > 0, a fraction of at least 1 - eta of them) lie strictly within
//! epsilon of the values at x.
struct NeighborhoodSpec {
  std::vector<DensityFn> bank;
  double epsilon = 0.0;
  double eta = 0.0;
};

void validate(const NeighborhoodSpec& spec);

//! Hits needed so that hits/m >= 1 - eta; comparison kept in the fraction
//! scale, so callers test hits >= eta_required(...).
double eta_required(std::size_t bank_size, double eta);

bool member(const NeighborhoodSpec& spec, std::span<const double> x, std::span<const double> y);

//! Membership against a single reference density: |f(x) - f(y)| < eps.
bool star_member(const DensityFn& f, double eps, std::span<const double> x,
                 std::span<const double> y);

struct McVolume {
  double volume = 0.0;
  std::size_t hits = 0;
  std::size_t draws = 0;
};

//! Hit-or-miss volume of {y in box : pred(y)}: box volume times hit fraction.
//! Draws come from the stream in a fixed order, so the result is a pure
//! function of (pred, box, n, stream).
McVolume mc_volume(const std::function<bool(std::span<const double>)>& pred,
                   const BoundingBox& box, std::size_t n, RngStream stream);

//! n uniform draws on the box, one row per draw.
PointMatrix uniform_box_sample(const BoundingBox& box, std::size_t n, RngStream& stream);

}  // namespace levelagg
