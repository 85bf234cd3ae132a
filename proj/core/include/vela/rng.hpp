#pragma once

#include <cstdint>

#include "vela/tensor.hpp"

namespace vela {

/// Counter-based generator: the value for (stream, counter) is a pure function
/// of the 64-bit seed, so draws do not depend on call order or thread layout.
/// Mixing is the splitmix64 finalizer applied twice over the packed key.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {}

  static std::uint64_t mix(std::uint64_t z);

  std::uint64_t bits(std::uint64_t counter) const;
  /// Uniform in [0, 1) with 53 random bits.
  double uniform(std::uint64_t counter) const;
  /// Standard normal via Box-Muller on counters 2c and 2c+1.
  double normal(std::uint64_t counter) const;

  /// Sequential convenience interface on top of the counter.
  double next_uniform() { return uniform(pos_++); }
  double next_normal() { return normal(pos_++); }
  Vec3 next_normal3();
  /// Uniform in the closed unit ball (rejection sampling).
  Vec3 next_in_ball();
  /// Uniform on the unit sphere.
  Vec3 next_on_sphere();

  CounterRng substream(std::uint64_t id) const { return CounterRng(seed_, mix(stream_ ^ mix(id + 1))); }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t pos_ = 0;
};

}  // namespace vela
