#pragma once

#include <cstdint>

namespace nvx {

// SplitMix64 (Vigna). Fixed as the project-wide generator so every seeded
// artifact is identical across platforms.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Unbiased enough for workload synthesis; bound must be nonzero.
  std::uint64_t below(std::uint64_t bound) { return next() % bound; }

  std::uint64_t range(std::uint64_t lo, std::uint64_t hi) {  // inclusive
    return lo + below(hi - lo + 1);
  }

  // Chance of k in n.
  bool chance(std::uint64_t k, std::uint64_t n) { return below(n) < k; }

 private:
  std::uint64_t state_;
};

}  // namespace nvx
