#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace qwoa {

// All randomness in the project funnels through mt19937_64 plus the helpers
// below. std::uniform_real_distribution and friends are implementation
// defined, so we roll the variate transforms by hand to keep emitted files
// byte-stable across standard libraries.

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Stable sub-seed for task `tag` of a command seeded with `seed`.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t s = seed ^ (0x6a09e667f3bcc909ULL + tag);
  std::uint64_t a = splitmix64(s);
  std::uint64_t b = splitmix64(s);
  return a ^ (b << 1);
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, bound) by rejection; bound must be positive.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = bound * (UINT64_MAX / bound);
  std::uint64_t r;
  do {
    r = rng();
  } while (r >= limit);
  return r % bound;
}

// Standard normal via Box-Muller; consumes exactly two uniforms per call.
inline double normal01(std::mt19937_64& rng) {
  const double u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  const double pi = 3.14159265358979323846;
  return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * pi * u2);
}

}  // namespace qwoa
