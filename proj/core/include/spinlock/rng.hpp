#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace spinlock {

// Counter-based deterministic RNG (SplitMix64 core). Streams are derived
// from (seed, stream name, counter), so a sweep point can seed its own
// generator independently of scheduling order or worker count: identical
// inputs give bit-identical draws everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(mix(seed ^ kPhi)) {}

  Rng(std::uint64_t seed, std::string_view stream, std::uint64_t counter)
      : state_(mix(mix(seed ^ fnv1a(stream)) + counter * kPhi)) {}

  std::uint64_t next_u64() {
    state_ += kPhi;
    return mix(state_);
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller. One value per call; no cached state.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  // Exact Bernoulli-count binomial draw. O(n), deterministic.
  std::uint64_t binomial(std::uint64_t n, double p) {
    std::uint64_t k = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
      if (uniform() < p) ++k;
    }
    return k;
  }

 private:
  static constexpr std::uint64_t kPhi = 0x9E3779B97F4A7C15ull;

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  static constexpr std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (char c : s) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001B3ull;
    }
    return h;
  }

  std::uint64_t state_;
};

}  // namespace spinlock
