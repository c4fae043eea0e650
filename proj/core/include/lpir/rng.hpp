#pragma once

#include <cstdint>
#include <stdexcept>

namespace lpir {

/// Deterministic seedable generator (SplitMix64). Small state, full 64-bit
/// output quality, and cheap derivation of independent sub-streams, which
/// keeps Monte Carlo runs reproducible regardless of scheduling.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next_u64() noexcept {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, bound) by rejection, unbiased. bound must be > 0.
  std::uint64_t next_below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("bound must be > 0");
    // Rejecting draws below the largest multiple of bound keeps this unbiased.
    const std::uint64_t threshold = -bound % bound;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  /// Derives the seed of an independent sub-stream from a master seed and a
  /// stream index (e.g. a Monte Carlo trial number).
  static std::uint64_t derive(std::uint64_t master_seed, std::uint64_t stream_index) noexcept {
    SplitMix64 g(master_seed ^ (0xd1b54a32d192ed03ULL * (stream_index + 1)));
    g.next_u64();
    return g.next_u64();
  }

 private:
  std::uint64_t state_;
};

}  // namespace lpir
