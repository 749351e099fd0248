#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace fhtlr {

// All stochasticity flows from one experiment seed through named substreams.
// The generator is mt19937_64; raw 64-bit output is identical on every
// platform, and the draw helpers below avoid std::*_distribution, whose
// output is implementation-defined.
using Rng = std::mt19937_64;

enum class Stream : std::uint64_t {
  kEpisodeEnv = 1,    // environment randomness within one episode
  kEpisodeExplore,    // epsilon-greedy coin flips and uniform actions
  kFactorInit,        // PARAFAC factor initialization
  kTrain,             // per-episode training substream
  kEval,              // per-checkpoint evaluation substream
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed of the substream identified by (root, purpose, a, b).
inline std::uint64_t stream_seed(std::uint64_t root, Stream purpose,
                                 std::uint64_t a = 0, std::uint64_t b = 0) {
  std::uint64_t h = splitmix64(root ^ 0x6a09e667f3bcc909ULL);
  h = splitmix64(h ^ static_cast<std::uint64_t>(purpose));
  h = splitmix64(h ^ splitmix64(a));
  h = splitmix64(h ^ splitmix64(b));
  return h;
}

inline double next_unit(Rng& rng) {  // uniform in [0, 1)
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline bool next_bernoulli(Rng& rng, double p) { return next_unit(rng) < p; }

// Uniform integer in [0, bound). Lemire multiply-shift with rejection,
// so there is no modulo bias and the result is platform-stable.
inline std::uint64_t next_below(Rng& rng, std::uint64_t bound) {
  using u128 = unsigned __int128;
  u128 m = static_cast<u128>(rng()) * bound;
  auto lo = static_cast<std::uint64_t>(m);
  if (lo < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (lo < threshold) {
      m = static_cast<u128>(rng()) * bound;
      lo = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

// Standard normal via Box-Muller; two uniforms per draw, stateless.
inline double next_gaussian(Rng& rng) {
  const double u1 = 1.0 - next_unit(rng);  // (0, 1], keeps log() finite
  const double u2 = next_unit(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace fhtlr
