#pragma once

#include <array>
#include <cstdint>

namespace heataco {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// xoshiro256++ generator. Hand-rolled so seeded runs produce identical
/// streams on every platform and standard-library version.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64(sm);
  }

  /// Independent stream keyed by (seed, a, b). Streams for different keys
  /// can be drawn in any order, so per-ant sampling is schedule-invariant.
  static Rng stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    std::uint64_t sm = seed;
    std::uint64_t h = splitmix64(sm);
    sm = h ^ (a + 0x9E3779B97F4A7C15ull);
    h = splitmix64(sm);
    sm = h ^ (b + 0xBF58476D1CE4E5B9ull);
    return Rng(splitmix64(sm));
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1), 53 random bits.
  double uniform01() { return double(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound), unbiased.
  std::uint32_t below(std::uint32_t bound) {
    const std::uint64_t span = 0x100000000ull;
    const std::uint64_t threshold = span - span % bound;
    for (;;) {
      const std::uint64_t r = next() >> 32;
      if (r < threshold) return static_cast<std::uint32_t>(r % bound);
    }
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_{};
};

}  // namespace heataco
