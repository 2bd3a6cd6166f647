#pragma once

#include "finsler/background.hpp"
#include "finsler/tensor.hpp"

#include <cstdint>

namespace finsler {

/// SplitMix64: 64-bit state, seedable, identical streams on every platform.
/// All random sampling in the library and the CLI goes through this type.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal via Box-Muller (no cached second value).
  double normal();
  /// Sign +1 or -1 with equal probability.
  int sign() { return (next_u64() >> 63) ? 1 : -1; }

 private:
  std::uint64_t state_;
};

/// Uniform point in the box [lo, hi]^dim.
Vector sample_point(Rng& rng, int dim, double lo, double hi);

struct VelocitySample {
  Vector y;
  int rejections = 0;  // draws discarded because q <= q_min
};

/// y on the unit a-sphere at the site, scaled by a log-uniform magnitude in
/// [0.1, 10]; draws with q <= q_min are rejected and redrawn.
/// Throws DomainError after max_tries rejections.
VelocitySample sample_velocity(Rng& rng, const Site& site, int max_tries = 1000);

}  // namespace finsler
