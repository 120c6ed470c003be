#pragma once

#include <algorithm>
#include <cstdint>

namespace ilpsched {

// splitmix64. Everything that must reproduce byte-identically across
// toolchains goes through this generator: std::shuffle and the standard
// distributions are implementation-defined and would break golden files.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Unbiased integer in [0, bound); bound must be nonzero.
  std::uint64_t next_below(std::uint64_t bound) noexcept {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = next();
      if (r >= threshold) return r % bound;
    }
  }

  // Uniform in [0, 1), 53 bits of mantissa.
  double next_unit() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  // Uniform in [lo, hi]; clamped so rounding can never escape the interval.
  double next_real(double lo, double hi) noexcept {
    return std::min(lo + (hi - lo) * next_unit(), hi);
  }

 private:
  std::uint64_t state_;
};

// Derives an independent stream from a base seed, e.g. one per quantum.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  SplitMix64 g(seed ^ (stream * 0x9e3779b97f4a7c15ull + 0x2545f4914f6cdd1dull));
  return g.next();
}

}  // namespace ilpsched
