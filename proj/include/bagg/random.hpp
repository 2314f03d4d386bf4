#pragma once

#include <cstdint>
#include <random>

namespace bagg {

using Rng = std::mt19937_64;

// Independent stream `stream` of the generator family keyed by `seed`.
// Replicates, Monte Carlo blocks and train/test generators each draw from
// their own stream so results never depend on thread scheduling.
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x9e3779b9u};
  return Rng(seq);
}

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

// Uniform on (0, 1]; safe to take the log of.
inline double uniform_open0(Rng& rng) { return 1.0 - uniform01(rng); }

inline double std_normal(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

// Gamma(shape, rate).
inline double gamma_rate(Rng& rng, double shape, double rate) {
  return std::gamma_distribution<double>(shape, 1.0 / rate)(rng);
}

}  // namespace bagg
