#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "msplit/instance.hpp"

namespace msplit {

struct InstanceTooLarge : std::runtime_error {
  InstanceTooLarge(int n, int cap)
      : std::runtime_error("meet-in-the-middle oracle capped at n = " + std::to_string(cap) +
                           ", instance has n = " + std::to_string(n)) {}
};

namespace detail {

inline std::uint64_t mix_sums(const std::vector<long long>& sums) {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  for (long long v : sums) {
    std::uint64_t z = h ^ static_cast<std::uint64_t>(v);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    h = z ^ (z >> 31);
  }
  return h;
}

inline long long checked_add(long long a, long long b) {
  long long out;
  if (__builtin_add_overflow(a, b, &out)) throw std::overflow_error("oracle partial sum overflow");
  return out;
}

// Visit every subset of columns [start, start+count) in Gray-code order with
// incrementally maintained partial sums A_subset * 1.
template <class Visit>
inline void scan_half(const Instance& inst, int start, int count, Visit&& visit) {
  std::vector<long long> sums(inst.m, 0);
  std::uint64_t mask = 0;
  visit(mask, sums);
  for (std::uint64_t i = 1; i < (1ULL << count); ++i) {
    const int bit = std::countr_zero(i);
    mask ^= 1ULL << bit;
    const bool added = (mask >> bit) & 1;
    for (int r = 0; r < inst.m; ++r) {
      const long long col = inst.A[r][start + bit];
      sums[r] = checked_add(sums[r], added ? col : -col);
    }
    visit(mask, sums);
  }
}

struct MitmPrep {
  int left;   // ceil(n/2) variables tabulated
  int right;  // remaining variables scanned
  std::vector<std::pair<std::uint64_t, std::uint32_t>> table;  // (key hash, left mask), sorted
};

inline MitmPrep mitm_prepare(const Instance& inst, int cap) {
  validate_instance(inst);
  for (int j = 0; j < inst.n; ++j)
    if (inst.l[j] != 0 || inst.r[j] != 1)
      throw std::invalid_argument("meet-in-the-middle oracle handles 0/1 bounds only");
  if (cap < 1 || cap > 62) throw std::invalid_argument("oracle cap out of range");
  if (inst.n > cap) throw InstanceTooLarge(inst.n, cap);

  MitmPrep prep;
  prep.left = (inst.n + 1) / 2;
  prep.right = inst.n - prep.left;
  prep.table.reserve(std::size_t{1} << prep.left);
  scan_half(inst, 0, prep.left, [&](std::uint64_t mask, const std::vector<long long>& sums) {
    prep.table.emplace_back(mix_sums(sums), static_cast<std::uint32_t>(mask));
  });
  std::sort(prep.table.begin(), prep.table.end());
  return prep;
}

// Exact key comparison: recompute the left partial sums of a tabulated mask.
inline bool left_mask_matches(const Instance& inst, std::uint32_t mask,
                              const std::vector<long long>& target) {
  for (int r = 0; r < inst.m; ++r) {
    long long acc = 0;
    for (std::uint32_t b = mask; b;) {
      const int j = std::countr_zero(b);
      b &= b - 1;
      acc = checked_add(acc, inst.A[r][j]);
    }
    if (acc != target[r]) return false;
  }
  return true;
}

template <class Emit>
inline void mitm_scan(const Instance& inst, int cap, Emit&& emit) {
  const MitmPrep prep = mitm_prepare(inst, cap);
  std::vector<long long> target(inst.m);
  scan_half(inst, prep.left, prep.right, [&](std::uint64_t rmask, const std::vector<long long>& rsums) {
    for (int r = 0; r < inst.m; ++r) {
      long long t;
      if (__builtin_sub_overflow(inst.d[r], rsums[r], &t)) throw std::overflow_error("oracle target overflow");
      target[r] = t;
    }
    const std::uint64_t h = mix_sums(target);
    auto range = std::equal_range(prep.table.begin(), prep.table.end(), std::make_pair(h, std::uint32_t{0}),
                                  [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto it = range.first; it != range.second; ++it)
      if (left_mask_matches(inst, it->second, target)) emit(it->second, rmask, prep.left);
  });
}

}  // namespace detail

/// All 0/1 solutions of A*x = d by meet-in-the-middle: tabulate the partial
/// sums of the first ceil(n/2) variables, scan the rest probing d - partial.
/// Table size is bounded by 2^ceil(n/2) entries, hence the cap on n.
inline std::vector<Solution> mitm_enumerate(const Instance& inst, int cap = 44) {
  std::vector<Solution> out;
  detail::mitm_scan(inst, cap, [&](std::uint32_t lmask, std::uint64_t rmask, int left) {
    Solution x(inst.n, 0);
    for (int j = 0; j < left; ++j) x[j] = (lmask >> j) & 1;
    for (int j = left; j < inst.n; ++j) x[j] = (rmask >> (j - left)) & 1;
    out.push_back(std::move(x));
  });
  return out;
}

/// Solution count without materializing the solutions.
inline std::uint64_t mitm_count(const Instance& inst, int cap = 44) {
  std::uint64_t count = 0;
  detail::mitm_scan(inst, cap, [&](std::uint32_t, std::uint64_t, int) { ++count; });
  return count;
}

}  // namespace msplit
