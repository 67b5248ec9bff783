#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include "pseudospec/types.hpp"

namespace pseudospec {

/// Deterministic splittable generator (splitmix64 core). All randomness in
/// the library flows from one user seed through subsystem splits, so results
/// are reproducible independent of standard-library distribution details.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ^ kGolden) {}

  std::uint64_t next_u64() {
    state_ += kGolden;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double th = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(th);
    have_spare_ = true;
    return r * std::cos(th);
  }

  Complex gaussian_complex() {
    double re = gaussian();
    double im = gaussian();
    return {re, im};
  }

  /// Derive an independent stream for a named subsystem or item index.
  static std::uint64_t split(std::uint64_t seed, std::uint64_t subsystem) {
    Rng mix(seed * 0x9E3779B97F4A7C15ULL + subsystem + 1);
    return mix.next_u64();
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

/// Stable subsystem identifiers for seed splitting (documented in README).
enum class RngStream : std::uint64_t {
  kBallSampler = 1,
  kGridSweep = 2,
  kConservationProbes = 3,
  kDistanceOptimizer = 4,
  kWitnessSearch = 5,
  kSimpleGuarantee = 6,
};

inline std::uint64_t split_seed(std::uint64_t seed, RngStream stream) {
  return Rng::split(seed, static_cast<std::uint64_t>(stream));
}

}  // namespace pseudospec
