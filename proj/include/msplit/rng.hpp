#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

namespace msplit {

// splitmix64 (Steele/Lea/Flood mixer). Fixed here so that instance
// generation and basis shuffles reproduce bit-for-bit across builds.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform draw from {0, ..., bound-1}. Rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t bound) {
    // 2^64 mod bound; draws under this threshold would skew the residues.
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = next();
      if (r >= threshold) return r % bound;
    }
  }

 private:
  std::uint64_t state_;
};

// Fisher-Yates permutation of {0, ..., n-1} driven by an existing stream.
inline std::vector<std::size_t> random_permutation(std::size_t n, SplitMix64& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = n; i-- > 1;) {
    const std::size_t j = static_cast<std::size_t>(rng.below(i + 1));
    std::swap(idx[i], idx[j]);
  }
  return idx;
}

inline std::vector<std::size_t> random_permutation(std::size_t n, std::uint64_t seed) {
  SplitMix64 rng(seed);
  return random_permutation(n, rng);
}

}  // namespace msplit
