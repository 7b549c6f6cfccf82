#pragma once

#include <cstdint>
#include <numbers>
#include <cmath>

namespace bbm {

// Counter-based normal variates: every (seed, stream, counter) triple maps to
// one N(0,1) draw, so paths can be generated in any order or thread layout.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Sub-seed for the index-th consumer of a run seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

/// Uniform in (0, 1), never 0 or 1.
inline double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  const std::uint64_t h = splitmix64(derive_seed(seed, stream) ^ splitmix64(counter));
  return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

/// Box-Muller on two uniforms drawn from even/odd counters.
inline double counter_normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  const double u1 = counter_uniform(seed, stream, 2 * counter);
  const double u2 = counter_uniform(seed, stream, 2 * counter + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace bbm
