#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace pairsim {

/// Seeded stream for one simulation shard. The engine is std::mt19937_64 fed
/// through std::seed_seq{seed_lo, seed_hi, shard_lo, shard_hi}; both are
/// specified bit-exactly by the standard, so draws are portable. Uniforms are
/// built from the top 53 bits rather than std distributions, whose algorithms
/// are implementation-defined.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t shard) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(shard),
                      static_cast<std::uint32_t>(shard >> 32)};
    engine_.seed(seq);
  }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

/// Box-Muller transform of two uniforms on [0, 1) into one standard normal.
inline double standard_normal(double u1, double u2) {
  return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace pairsim
