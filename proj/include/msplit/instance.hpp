#pragma once

#include <gmpxx.h>

#include <charconv>
#include <cstdint>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "msplit/mp.hpp"
#include "msplit/rng.hpp"

namespace msplit {

/// A bounded linear Diophantine system: find x with A*x = d, l <= x <= r.
/// Entries are 64-bit; the lattice layer switches to arbitrary precision.
struct Instance {
  int m = 0;  // rows (equations)
  int n = 0;  // columns (variables)
  std::vector<std::vector<long long>> A;  // m rows of n entries
  std::vector<long long> d;               // right-hand side, length m
  std::vector<long long> l;               // lower bounds, length n
  std::vector<long long> r;               // upper bounds, length n
};

using Solution = std::vector<long long>;

struct ParseError : std::runtime_error {
  int line;
  ParseError(int line_, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line_) + ": " + msg), line(line_) {}
};

inline void validate_instance(const Instance& inst) {
  if (inst.m <= 0 || inst.n <= 0) throw std::invalid_argument("instance dimensions must be positive");
  if (static_cast<int>(inst.A.size()) != inst.m) throw std::invalid_argument("row count mismatch");
  for (const auto& row : inst.A)
    if (static_cast<int>(row.size()) != inst.n) throw std::invalid_argument("row length mismatch");
  if (static_cast<int>(inst.d.size()) != inst.m) throw std::invalid_argument("rhs length mismatch");
  if (static_cast<int>(inst.l.size()) != inst.n || static_cast<int>(inst.r.size()) != inst.n)
    throw std::invalid_argument("bounds length mismatch");
  for (int i = 0; i < inst.n; ++i)
    if (inst.l[i] > inst.r[i])
      throw std::invalid_argument("lower bound exceeds upper bound at variable " + std::to_string(i + 1));
}

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline long long parse_i64(std::string_view tok, int line) {
  long long v = 0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec == std::errc::result_out_of_range)
    throw ParseError(line, "integer out of 64-bit range: '" + std::string(tok) + "'");
  if (ec != std::errc() || ptr != last)
    throw ParseError(line, "not an integer: '" + std::string(tok) + "'");
  return v;
}

}  // namespace detail

/// Parse the CD text format:
///   line 1: "m n"
///   m lines: "a_i1 ... a_in d_i"
///   optional: "l: v1 ... vn" and "r: v1 ... vn"
/// '#' starts a comment, blank lines are ignored. Defaults: l = 0, r = 1.
inline Instance parse_instance(std::istream& in) {
  Instance inst;
  bool have_header = false, have_l = false, have_r = false;
  int rows_read = 0;
  int lineno = 0;
  std::string raw;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line(raw);
    if (auto pos = line.find('#'); pos != std::string_view::npos) line = line.substr(0, pos);
    auto toks = detail::split_ws(line);
    if (toks.empty()) continue;

    if (!have_header) {
      if (toks.size() != 2) throw ParseError(lineno, "expected header 'm n'");
      const long long m = detail::parse_i64(toks[0], lineno);
      const long long n = detail::parse_i64(toks[1], lineno);
      if (m < 1 || n < 1 || m > 1'000'000 || n > 1'000'000)
        throw ParseError(lineno, "invalid dimensions in header");
      inst.m = static_cast<int>(m);
      inst.n = static_cast<int>(n);
      inst.A.assign(inst.m, {});
      inst.d.assign(inst.m, 0);
      inst.l.assign(inst.n, 0);
      inst.r.assign(inst.n, 1);
      have_header = true;
      continue;
    }
    if (rows_read < inst.m) {
      if (static_cast<int>(toks.size()) != inst.n + 1)
        throw ParseError(lineno, "expected " + std::to_string(inst.n + 1) + " numbers in matrix row, got " +
                                     std::to_string(toks.size()));
      auto& row = inst.A[rows_read];
      row.resize(inst.n);
      for (int j = 0; j < inst.n; ++j) row[j] = detail::parse_i64(toks[j], lineno);
      inst.d[rows_read] = detail::parse_i64(toks[inst.n], lineno);
      ++rows_read;
      continue;
    }
    if (toks[0] == "l:" || toks[0] == "r:") {
      const bool is_l = toks[0] == "l:";
      if ((is_l && have_l) || (!is_l && have_r)) throw ParseError(lineno, "duplicate bounds line");
      if (static_cast<int>(toks.size()) != inst.n + 1)
        throw ParseError(lineno, "bounds line needs " + std::to_string(inst.n) + " numbers");
      auto& dst = is_l ? inst.l : inst.r;
      for (int j = 0; j < inst.n; ++j) dst[j] = detail::parse_i64(toks[j + 1], lineno);
      (is_l ? have_l : have_r) = true;
      continue;
    }
    throw ParseError(lineno, "unexpected content after matrix rows");
  }
  if (!have_header) throw ParseError(lineno, "empty input, expected header 'm n'");
  if (rows_read < inst.m)
    throw ParseError(lineno, "expected " + std::to_string(inst.m) + " matrix rows, got " + std::to_string(rows_read));
  for (int j = 0; j < inst.n; ++j)
    if (inst.l[j] > inst.r[j])
      throw ParseError(lineno, "lower bound exceeds upper bound at variable " + std::to_string(j + 1));
  return inst;
}

inline Instance parse_instance(const std::string& text) {
  std::istringstream in(text);
  return parse_instance(in);
}

/// Canonical CD serialization; bounds lines appear only when non-default.
/// parse_instance(serialize_instance(inst)) == inst for every valid instance.
inline std::string serialize_instance(const Instance& inst) {
  std::ostringstream out;
  out << inst.m << ' ' << inst.n << '\n';
  for (int i = 0; i < inst.m; ++i) {
    for (int j = 0; j < inst.n; ++j) out << inst.A[i][j] << ' ';
    out << inst.d[i] << '\n';
  }
  bool any_l = false, any_r = false;
  for (int j = 0; j < inst.n; ++j) {
    any_l |= inst.l[j] != 0;
    any_r |= inst.r[j] != 1;
  }
  if (any_l) {
    out << "l:";
    for (long long v : inst.l) out << ' ' << v;
    out << '\n';
  }
  if (any_r) {
    out << "r:";
    for (long long v : inst.r) out << ' ' << v;
    out << '\n';
  }
  return out.str();
}

/// Generate a market-split instance: n = 10(m-1), entries uniform in
/// {0,...,D-1} drawn row-major from one splitmix64 stream.
/// plant=false: d_i = floor(row_sum/2). plant=true: a random 0/1 vector with
/// exactly floor(n/2) ones is drawn from the same stream and d = A*x*, which
/// guarantees feasibility; x* is reported through planted_out when non-null.
inline Instance generate_cd(int m, long long D, std::uint64_t seed, bool plant,
                            Solution* planted_out = nullptr) {
  if (m < 2) throw std::invalid_argument("generate_cd requires m >= 2");
  if (D < 1) throw std::invalid_argument("generate_cd requires D >= 1");
  Instance inst;
  inst.m = m;
  inst.n = 10 * (m - 1);
  inst.A.assign(inst.m, std::vector<long long>(inst.n, 0));
  inst.d.assign(inst.m, 0);
  inst.l.assign(inst.n, 0);
  inst.r.assign(inst.n, 1);

  SplitMix64 rng(seed);
  for (int i = 0; i < inst.m; ++i)
    for (int j = 0; j < inst.n; ++j)
      inst.A[i][j] = static_cast<long long>(rng.below(static_cast<std::uint64_t>(D)));

  if (!plant) {
    for (int i = 0; i < inst.m; ++i) {
      long long sum = 0;
      for (long long a : inst.A[i]) sum += a;
      inst.d[i] = sum / 2;  // floor, entries are nonnegative
    }
  } else {
    const auto perm = random_permutation(static_cast<std::size_t>(inst.n), rng);
    Solution xstar(inst.n, 0);
    for (int k = 0; k < inst.n / 2; ++k) xstar[perm[k]] = 1;
    for (int i = 0; i < inst.m; ++i) {
      long long sum = 0;
      for (int j = 0; j < inst.n; ++j) sum += inst.A[i][j] * xstar[j];
      inst.d[i] = sum;
    }
    if (planted_out) *planted_out = std::move(xstar);
  }
  return inst;
}

struct NormalizedInstance {
  Instance inst;                 // same system with l = 0
  std::vector<long long> shift;  // original l; solutions map back as x' + shift
};

/// Substitute x := x - l so the lower bound becomes zero:
/// d' = d - A*l, r' = r - l. Throws on 64-bit overflow of the shifted data.
inline NormalizedInstance normalize_bounds(const Instance& inst) {
  validate_instance(inst);
  NormalizedInstance out;
  out.inst = inst;
  out.shift = inst.l;
  bool all_zero = true;
  for (long long v : inst.l) all_zero &= v == 0;
  if (all_zero) return out;

  for (int i = 0; i < inst.m; ++i) {
    __int128 acc = inst.d[i];
    for (int j = 0; j < inst.n; ++j) acc -= static_cast<__int128>(inst.A[i][j]) * inst.l[j];
    if (acc > INT64_MAX || acc < INT64_MIN) throw std::overflow_error("normalized rhs exceeds 64-bit range");
    out.inst.d[i] = static_cast<long long>(acc);
  }
  for (int j = 0; j < inst.n; ++j) {
    const __int128 width = static_cast<__int128>(inst.r[j]) - inst.l[j];
    if (width > INT64_MAX) throw std::overflow_error("normalized bound exceeds 64-bit range");
    out.inst.r[j] = static_cast<long long>(width);
    out.inst.l[j] = 0;
  }
  return out;
}

/// Exact check of A*x = d and l <= x <= r (arbitrary-precision products).
inline bool verify_solution(const Instance& inst, const Solution& x) {
  if (static_cast<int>(x.size()) != inst.n) throw std::invalid_argument("solution length mismatch");
  for (int j = 0; j < inst.n; ++j)
    if (x[j] < inst.l[j] || x[j] > inst.r[j]) return false;
  mpz_class acc;
  for (int i = 0; i < inst.m; ++i) {
    acc = 0;
    for (int j = 0; j < inst.n; ++j) acc += to_mpz(inst.A[i][j]) * static_cast<long>(x[j]);
    if (acc != to_mpz(inst.d[i])) return false;
  }
  return true;
}

}  // namespace msplit
