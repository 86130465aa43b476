#pragma once

#include <cstdint>

namespace lwrfno {

/// SplitMix64: portable 64-bit PRNG with a single word of state.
/// Every draw is a fixed sequence of integer ops, so identical seeds give
/// identical streams on every platform. Substreams for independent scenarios
/// are opened by seeding with `master_seed ^ sample_index`; the output
/// scrambler decorrelates adjacent seeds.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1), 53 mantissa bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, bound). Lemire's unbiased multiply-shift rejection.
  std::uint64_t below(std::uint64_t bound) {
    unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * bound;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < bound) {
      const std::uint64_t cutoff = (0ull - bound) % bound;
      while (lo < cutoff) {
        m = static_cast<unsigned __int128>(next_u64()) * bound;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Uniform integer in [lo, hi], inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

 private:
  std::uint64_t state_;
};

/// Seed namespaces keep training, validation and held-out evaluation
/// scenarios on disjoint substreams even when sample indices overlap.
enum class SeedNamespace : std::uint64_t {
  train = 0x0ull,
  validation = 0x5A17F00D00000000ull,
  evaluation = 0xE7A1BEEF00000000ull,
};

inline std::uint64_t scenario_stream_seed(std::uint64_t master, SeedNamespace ns,
                                          std::uint64_t sample_index) {
  return master ^ static_cast<std::uint64_t>(ns) ^ sample_index;
}

}  // namespace lwrfno
