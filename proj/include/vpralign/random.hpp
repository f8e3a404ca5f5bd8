#pragma once

// Counter-based random numbers. Value k of stream s under seed S is
//   splitmix64_mix(S ^ stream_key(s) + (k + 1) * 0x9E3779B97F4A7C15)
// so any draw can be recomputed independently of the others. Normals use
// Box-Muller on consecutive uniform pairs (cosine branch for even indices,
// sine branch for odd ones).

#include <cmath>
#include <cstdint>
#include <numbers>

namespace vpralign {

constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class CounterRng {
 public:
  constexpr CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_(seed ^ splitmix64_mix(stream + 0x632BE59BD9B4E019ULL)) {}

  constexpr std::uint64_t bits(std::uint64_t counter) const {
    return splitmix64_mix(key_ + (counter + 1) * 0x9E3779B97F4A7C15ULL);
  }

  /// Uniform in (0, 1].
  double uniform(std::uint64_t counter) const {
    return static_cast<double>((bits(counter) >> 11) + 1) * 0x1.0p-53;
  }

  /// Standard normal number `index` of this stream.
  double normal(std::uint64_t index) const {
    const std::uint64_t pair = index >> 1;
    const double radius = std::sqrt(-2.0 * std::log(uniform(2 * pair)));
    const double angle = 2.0 * std::numbers::pi * uniform(2 * pair + 1);
    return (index & 1U) ? radius * std::sin(angle) : radius * std::cos(angle);
  }

 private:
  std::uint64_t key_;
};

/// Sequential reader over a CounterRng stream.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream) : rng_(seed, stream) {}

  double uniform() { return rng_.uniform(uniform_counter_++); }
  double normal() { return rng_.normal(normal_counter_++); }
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) {
    return static_cast<std::uint64_t>((1.0 - uniform()) * static_cast<double>(bound)) % bound;
  }

 private:
  CounterRng rng_;
  // Uniform draws use the upper half of the counter space so the two
  // readers never share values.
  std::uint64_t uniform_counter_ = std::uint64_t{1} << 62;
  std::uint64_t normal_counter_ = 0;
};

}  // namespace vpralign
