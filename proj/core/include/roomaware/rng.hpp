#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "roomaware/angles.hpp"

namespace roomaware {

// splitmix64 step; used to derive independent substream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Deterministic seed for a named substream of a base seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0,
                                 std::uint64_t c = 0) {
  std::uint64_t s = base;
  std::uint64_t h = splitmix64(s);
  s ^= a * 0xD1342543DE82EF95ULL;
  h ^= splitmix64(s);
  s ^= b * 0xAF251AF3B0F025B5ULL;
  h ^= splitmix64(s);
  s ^= c * 0x9E6C63D0876A9A75ULL;
  h ^= splitmix64(s);
  return h;
}

// Seeded random stream with explicitly pinned draw algorithms, so that a
// (seed, call sequence) pair reproduces bit-identically on any platform.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  int uniform_int(int n) { return static_cast<int>(uniform() * n); }

  // Box-Muller, cosine branch only; two uniforms per draw, no cached state.
  double gaussian(double stddev) {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return stddev * std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

  double gaussian(double mean, double stddev) { return mean + gaussian(stddev); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace roomaware
