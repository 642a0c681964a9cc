#pragma once

#include <cstdint>
#include <random>

namespace levelagg {

//! Seeded random stream with stable child-stream derivation, so every
//! consumer (replicates, test samples, volume draws) owns a disjoint
//! deterministic sequence regardless of evaluation order.
class RngStream {
public:
  explicit RngStream(std::uint64_t seed);

  //! Independent stream addressed by (tag, index); pure, does not advance this stream.
  RngStream child(std::uint64_t tag, std::uint64_t index = 0) const;

  std::uint64_t next_u64();
  double uniform();      // [0, 1)
  double uniform_pos();  // (0, 1]
  double normal();       // standard normal, Box-Muller
  double gamma(double shape);  // unit scale, shape > 0

private:
  std::uint64_t root_;
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace levelagg
