#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace maxent {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Independent generator for task `stream` under a master seed. Parallel
/// rollouts use one stream per episode index so results do not depend on
/// scheduling.
inline Rng stream_rng(std::uint64_t seed, std::uint64_t stream) {
  return Rng(splitmix64(seed ^ splitmix64(stream)));
}

/// Uniform in [0, 1) from the top 53 bits; identical on every platform.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Inverse-CDF draw from a probability vector.
inline int sample_index(std::span<const double> probs, Rng& rng) {
  const double u = uniform01(rng);
  double acc = 0.0;
  int last = -1;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    acc += probs[i];
    last = static_cast<int>(i);
    if (u < acc) return last;
  }
  return last;
}

}  // namespace maxent
