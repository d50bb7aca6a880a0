#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "msplit/instance.hpp"
#include "msplit/mp.hpp"
#include "msplit/matrix.hpp"

namespace msplit {

/// The (m+n+1) x (n+1) lattice basis the solver reduces. Column 0 encodes the
/// right-hand side, columns 1..n the variables:
///
///   ( -N*d      | N*A        )   m rows
///   ( -r_max    | diag(2c_j) )   n rows
///   (  r_max    | 0          )   1 row (marker)
///
/// with r_max = lcm(r_1..r_n) and c_j = r_max / r_j.
struct EmbeddingBasis {
  BigMatrix basis;
  mpz_class N;
  long long r_max = 1;
  std::vector<long long> c;
};

/// Kernel lattice basis after reduction: n-m+1 vectors in Z^(n+1).
/// Coordinate 0 is the marker row (last row of the embedding); coordinates
/// 1..n are the scaled variable rows in original order.
struct KernelBasis {
  int n = 0;
  long long r_max = 1;
  std::vector<long long> c;                     // length n
  std::vector<std::vector<long long>> vectors;  // each of length n+1

  int dim() const { return static_cast<int>(vectors.size()); }
};

struct KernelDimensionMismatch : std::runtime_error {
  int found;
  int expected;
  KernelDimensionMismatch(int found_, int expected_)
      : std::runtime_error("kernel dimension mismatch: found " + std::to_string(found_) + " zero-prefix columns, expected " +
                           std::to_string(expected_) + " (N too small or rank-deficient system)"),
        found(found_),
        expected(expected_) {}
};

namespace detail {

// lcm of the upper bounds plus the per-variable ratios; requires r_j >= 1.
// The scaled box has entries 2*c_j*r_j = 2*r_max, so r_max is kept small
// enough for the 64-bit kernel representation.
inline void bound_scaling(const Instance& inst, long long& r_max, std::vector<long long>& c) {
  mpz_class lcm(1);
  for (int j = 0; j < inst.n; ++j) {
    if (inst.r[j] < 1) throw std::invalid_argument("bound_scaling requires r_j >= 1");
    mpz_class rj = to_mpz(inst.r[j]);
    mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), rj.get_mpz_t());
    if (mpz_sizeinbase(lcm.get_mpz_t(), 2) > 31)
      throw std::overflow_error("lcm of upper bounds exceeds 2^31, unsupported");
  }
  r_max = lcm.get_si();
  c.resize(inst.n);
  for (int j = 0; j < inst.n; ++j) c[j] = r_max / inst.r[j];
}

inline int ceil_log2(const mpz_class& z) {
  if (z <= 1) return 0;
  const std::size_t bits = mpz_sizeinbase(z.get_mpz_t(), 2);
  // sizeinbase gives floor(log2)+1; powers of two land exactly on it
  const bool pow2 = mpz_scan1(z.get_mpz_t(), 0) == bits - 1;
  return static_cast<int>(pow2 ? bits - 1 : bits);
}

}  // namespace detail

/// Scaling constant for the equation rows: N = 2^k with
/// k = ceil(log2((n+1) * max(max|a_ij|, max|d_i|, 1) * r_max)) + 10.
/// Powers of two keep escalation (squaring) and multiplication cheap. If the
/// kernel extraction reports a dimension mismatch the caller retries once
/// with N^2.
inline mpz_class choose_N(const Instance& inst) {
  validate_instance(inst);
  long long r_max;
  std::vector<long long> c;
  detail::bound_scaling(inst, r_max, c);

  long long mx = 1;
  for (const auto& row : inst.A)
    for (long long a : row) mx = std::max(mx, a < 0 ? -a : a);
  for (long long v : inst.d) mx = std::max(mx, v < 0 ? -v : v);

  const mpz_class magnitude = mpz_class(inst.n + 1) * to_mpz(mx) * to_mpz(r_max);
  const int k = detail::ceil_log2(magnitude) + 10;
  mpz_class N;
  mpz_ui_pow_ui(N.get_mpz_t(), 2, static_cast<unsigned long>(k));
  return N;
}

/// Build the embedding for a normalized instance (l = 0, r >= 1).
inline EmbeddingBasis build_embedding(const Instance& inst, const mpz_class& N) {
  validate_instance(inst);
  for (long long v : inst.l)
    if (v != 0) throw std::invalid_argument("build_embedding requires l = 0 (normalize first)");
  if (N <= 0) throw std::invalid_argument("N must be positive");

  EmbeddingBasis out;
  out.N = N;
  detail::bound_scaling(inst, out.r_max, out.c);

  const int m = inst.m, n = inst.n;
  out.basis = BigMatrix(m + n + 1, n + 1);
  auto& B = out.basis;
  for (int i = 0; i < m; ++i) B.at(i, 0) = -N * to_mpz(inst.d[i]);
  for (int i = 0; i < n; ++i) B.at(m + i, 0) = to_mpz(-out.r_max);
  B.at(m + n, 0) = to_mpz(out.r_max);
  for (int j = 1; j <= n; ++j) {
    for (int i = 0; i < m; ++i) B.at(i, j) = N * to_mpz(inst.A[i][j - 1]);
    B.at(m + (j - 1), j) = to_mpz(2 * out.c[j - 1]);
  }
  return out;
}

/// Pick out the reduced columns whose first m rows are all zero, drop those
/// rows, and reorder coordinates to (marker, variables 1..n). Requires
/// exactly n-m+1 such columns, otherwise KernelDimensionMismatch.
inline KernelBasis extract_kernel(const EmbeddingBasis& reduced, int m) {
  const BigMatrix& B = reduced.basis;
  const int n = B.cols - 1;
  if (B.rows != m + n + 1) throw std::invalid_argument("extract_kernel: inconsistent dimensions");
  if (n - m + 1 < 1) throw std::invalid_argument("extract_kernel: more equations than variables");

  KernelBasis kb;
  kb.n = n;
  kb.r_max = reduced.r_max;
  kb.c = reduced.c;

  for (int j = 0; j <= n; ++j) {
    bool zero_prefix = true;
    for (int i = 0; i < m && zero_prefix; ++i) zero_prefix = B.at(i, j) == 0;
    if (!zero_prefix) continue;
    std::vector<long long> v(n + 1);
    if (!B.at(m + n, j).fits_slong_p()) throw std::overflow_error("kernel entry exceeds 64-bit range");
    v[0] = B.at(m + n, j).get_si();  // marker row first
    for (int i = 0; i < n; ++i) {
      if (!B.at(m + i, j).fits_slong_p()) throw std::overflow_error("kernel entry exceeds 64-bit range");
      v[1 + i] = B.at(m + i, j).get_si();
    }
    kb.vectors.push_back(std::move(v));
  }
  const int expected = n - m + 1;
  if (kb.dim() != expected) throw KernelDimensionMismatch(kb.dim(), expected);
  return kb;
}

/// Exact membership check: a kernel vector encodes integers (x, t) via
/// marker = r_max*t and v_i = 2c_i x_i - r_max*t; it must satisfy A*x = d*t.
inline bool kernel_vector_solves_extended(const Instance& inst, const KernelBasis& kb,
                                          const std::vector<long long>& v) {
  if (static_cast<int>(v.size()) != kb.n + 1) return false;
  if (v[0] % kb.r_max != 0) return false;
  const long long t = v[0] / kb.r_max;
  std::vector<mpz_class> x(kb.n);
  for (int i = 0; i < kb.n; ++i) {
    const mpz_class num = to_mpz(v[1 + i]) + to_mpz(kb.r_max) * to_mpz(t);
    const mpz_class den = 2 * to_mpz(kb.c[i]);
    if (num % den != 0) return false;
    x[i] = num / den;
  }
  mpz_class acc;
  for (int i = 0; i < inst.m; ++i) {
    acc = 0;
    for (int j = 0; j < inst.n; ++j) acc += to_mpz(inst.A[i][j]) * x[j];
    if (acc != to_mpz(inst.d[i]) * to_mpz(t)) return false;
  }
  return true;
}

inline bool kernel_basis_solves_extended(const Instance& inst, const KernelBasis& kb) {
  for (const auto& v : kb.vectors)
    if (!kernel_vector_solves_extended(inst, kb, v)) return false;
  return true;
}

}  // namespace msplit
