#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "msplit/embedding.hpp"
#include "msplit/matrix.hpp"

namespace msplit {

namespace detail {

// Exact-to-float conversion via the limb representation, so it works for
// double, long double and software floats alike.
template <class F>
inline F to_float(const mpz_class& z) {
  const mpz_srcptr p = z.get_mpz_t();
  const std::size_t limbs = mpz_size(p);
  const F base = F(4294967296.0) * F(4294967296.0);  // 2^64, exact
  F acc = 0;
  for (std::size_t i = limbs; i-- > 0;) acc = acc * base + F(mpz_getlimbn(p, i));
  return mpz_sgn(p) < 0 ? -acc : acc;
}

}  // namespace detail

/// Floating-point Gram-Schmidt data of a basis: coefficients mu_{i,j} (i > j),
/// squared norms ||b*_j||^2 and L1 norms ||b*_j||_1 (the latter feed the
/// Hoelder pruning test).
struct GsoData {
  std::vector<std::vector<double>> mu;  // mu[i] has i entries, j < i
  std::vector<double> bstar_sq;
  std::vector<double> bstar_l1;

  int dim() const { return static_cast<int>(bstar_sq.size()); }
};

namespace detail {

template <class GetEntry>
inline GsoData compute_gso_impl(int rows, int cols, const GetEntry& entry) {
  GsoData g;
  g.mu.resize(cols);
  g.bstar_sq.resize(cols);
  g.bstar_l1.resize(cols);
  std::vector<std::vector<double>> bstar(cols, std::vector<double>(rows));

  for (int k = 0; k < cols; ++k) {
    auto& v = bstar[k];
    for (int i = 0; i < rows; ++i) v[i] = entry(i, k);
    g.mu[k].resize(k);
    for (int j = 0; j < k; ++j) {
      double dot = 0;
      for (int i = 0; i < rows; ++i) dot += v[i] * bstar[j][i];
      const double m = dot / g.bstar_sq[j];
      g.mu[k][j] = m;
      for (int i = 0; i < rows; ++i) v[i] -= m * bstar[j][i];
    }
    double sq = 0, l1 = 0;
    for (int i = 0; i < rows; ++i) {
      sq += v[i] * v[i];
      l1 += std::fabs(v[i]);
    }
    if (!(sq > 0) || !std::isfinite(sq))
      throw std::runtime_error("GSO failed: dependent basis vectors or precision loss");
    g.bstar_sq[k] = sq;
    g.bstar_l1[k] = l1;
  }
  return g;
}

}  // namespace detail

inline GsoData compute_gso(const BigMatrix& b) {
  return detail::compute_gso_impl(b.rows, b.cols,
                                  [&](int i, int j) { return detail::to_float<double>(b.at(i, j)); });
}

inline GsoData compute_gso(const KernelBasis& kb) {
  return detail::compute_gso_impl(kb.n + 1, kb.dim(),
                                  [&](int i, int j) { return static_cast<double>(kb.vectors[j][i]); });
}

}  // namespace msplit
