#pragma once

// Self-contained deterministic random number utilities. The noise model
// draws per-voxel samples from a counter-based generator, so the result is
// a pure function of (seed, voxel index) and independent of any iteration
// or thread schedule. std::normal_distribution is avoided because its
// output sequence is implementation-defined.

#include <cmath>
#include <cstdint>

namespace voxmet {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline double uniform01(std::uint64_t bits) {
  // 53 mantissa bits; result in (0, 1].
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

// Standard normal sample keyed by (seed, counter) via Box-Muller.
inline double gaussian_at(std::uint64_t seed, std::uint64_t counter) {
  const std::uint64_t s = splitmix64(seed ^ splitmix64(counter));
  const double u1 = uniform01(s);
  const double u2 = uniform01(splitmix64(s));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
}

// Small sequential generator for test scene sampling.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(splitmix64(seed ^ 0xabcdef0123456789ULL)) {}

  std::uint64_t next() {
    state_ = splitmix64(state_);
    return state_;
  }

  // Uniform integer in [lo, hi] inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(next() % span);
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * (uniform01(next()) - 0x1.0p-53); }

 private:
  std::uint64_t state_;
};

}  // namespace voxmet
