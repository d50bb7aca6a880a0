#pragma once

#include <gmpxx.h>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "msplit/gso.hpp"
#include "msplit/matrix.hpp"
#include "msplit/rng.hpp"

namespace msplit {

struct PrecisionExhausted : std::runtime_error {
  PrecisionExhausted() : std::runtime_error("LLL: floating-point GSO inconsistent at every precision level") {}
};

struct PipelineTimeout : std::runtime_error {
  PipelineTimeout() : std::runtime_error("time limit exceeded") {}
};

struct LllOptions {
  double delta = 0.99;
  bool deep_insertions = false;  // experimental
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

namespace detail {

// One LLL run at fixed floating-point precision F. Exact integer column
// operations, approximate Gram-Schmidt recomputed per stage visit.
// Returns false when the arithmetic looks inconsistent so the driver can
// escalate the precision.
template <class F>
class LllRun {
 public:
  LllRun(BigMatrix& basis, const LllOptions& opts)
      : B_(basis), opts_(opts), rows_(basis.rows), d_(basis.cols) {}

  bool run() {
    using std::fabs;
    bf_.resize(d_);
    bstar_.assign(d_, std::vector<F>(rows_));
    mu_.resize(d_);
    bsq_.assign(d_, F(0));
    for (int j = 0; j < d_; ++j) refresh(j);

    if (!orthogonalize(0)) return false;
    const F delta = F(opts_.delta);
    int k = 1;
    std::uint64_t iters = 0;
    while (k < d_) {
      if ((++iters & 0xff) == 0 && opts_.deadline &&
          std::chrono::steady_clock::now() > *opts_.deadline)
        throw PipelineTimeout();
      if (iters > 50'000'000ULL) return false;  // oscillation guard

      if (!size_reduce(k)) return false;

      if (opts_.deep_insertions) {
        F c = dot(bf_[k], bf_[k]);
        int i = 0;
        while (i < k && c >= delta * bsq_[i]) {
          c -= mu_[k][i] * mu_[k][i] * bsq_[i];
          ++i;
        }
        if (i == k) {
          ++k;
        } else {
          deep_insert(i, k);
          k = i;
          if (k == 0) {
            if (!orthogonalize(0)) return false;
            k = 1;
          }
        }
      } else {
        if (bsq_[k] >= (delta - mu_[k][k - 1] * mu_[k][k - 1]) * bsq_[k - 1]) {
          ++k;
        } else {
          std::swap(B_.col[k], B_.col[k - 1]);
          std::swap(bf_[k], bf_[k - 1]);
          --k;
          if (k == 0) {
            if (!orthogonalize(0)) return false;
            k = 1;
          }
        }
      }
    }
    return validate(delta);
  }

 private:
  void refresh(int j) {
    auto& v = bf_[j];
    v.resize(rows_);
    for (int i = 0; i < rows_; ++i) v[i] = to_float<F>(B_.col[j][i]);
  }

  static F dot(const std::vector<F>& a, const std::vector<F>& b) {
    F acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
  }

  // Recompute row k of the GSO (modified Gram-Schmidt against the stored
  // orthogonal vectors). Rows < k must be valid.
  bool orthogonalize(int k) {
    auto& v = bstar_[k];
    v = bf_[k];
    mu_[k].assign(k, F(0));
    for (int j = 0; j < k; ++j) {
      const F m = dot(v, bstar_[j]) / bsq_[j];
      mu_[k][j] = m;
      for (int i = 0; i < rows_; ++i) v[i] -= m * bstar_[j][i];
    }
    bsq_[k] = dot(v, v);
    return bsq_[k] > 0;
  }

  bool size_reduce(int k) {
    using std::fabs;
    using std::floor;
    for (int pass = 0; pass < 32; ++pass) {
      if (!orthogonalize(k)) return false;
      bool changed = false;
      for (int j = k - 1; j >= 0; --j) {
        if (fabs(mu_[k][j]) <= F(0.5005)) continue;
        if (!(fabs(mu_[k][j]) < F(9.0e18))) return false;  // quotient too big for ll
        const long long q = static_cast<long long>(floor(mu_[k][j] + F(0.5)));
        col_submul(k, j, q);
        for (int i = 0; i < j; ++i) mu_[k][i] -= F(q) * mu_[j][i];
        mu_[k][j] -= F(q);
        changed = true;
      }
      if (!changed) return true;
      refresh(k);
    }
    return false;  // not converging
  }

  // B.col[k] -= q * B.col[j], exact
  void col_submul(int k, int j, long long q) {
    if (q == 0) return;
    auto& ck = B_.col[k];
    const auto& cj = B_.col[j];
    if (q > 0) {
      const unsigned long uq = static_cast<unsigned long>(q);
      for (int i = 0; i < rows_; ++i) mpz_submul_ui(ck[i].get_mpz_t(), cj[i].get_mpz_t(), uq);
    } else {
      const unsigned long uq = static_cast<unsigned long>(-q);
      for (int i = 0; i < rows_; ++i) mpz_addmul_ui(ck[i].get_mpz_t(), cj[i].get_mpz_t(), uq);
    }
  }

  // Move column k to position i, shifting i..k-1 up by one.
  void deep_insert(int i, int k) {
    auto colk = std::move(B_.col[k]);
    auto bfk = std::move(bf_[k]);
    for (int t = k; t > i; --t) {
      B_.col[t] = std::move(B_.col[t - 1]);
      bf_[t] = std::move(bf_[t - 1]);
    }
    B_.col[i] = std::move(colk);
    bf_[i] = std::move(bfk);
  }

  // Fresh GSO over the final basis; checks the advertised postconditions.
  bool validate(F delta) {
    using std::fabs;
    for (int j = 0; j < d_; ++j) refresh(j);
    for (int k = 0; k < d_; ++k)
      if (!orthogonalize(k)) return false;
    const F tol = F(1e-9);
    for (int k = 1; k < d_; ++k) {
      for (int j = 0; j < k; ++j)
        if (!(fabs(mu_[k][j]) <= F(0.501))) return false;
      const F lhs = delta * bsq_[k - 1];
      const F rhs = bsq_[k] + mu_[k][k - 1] * mu_[k][k - 1] * bsq_[k - 1];
      if (!(lhs <= rhs * (F(1) + tol))) return false;
    }
    return true;
  }

  BigMatrix& B_;
  const LllOptions& opts_;
  int rows_, d_;
  std::vector<std::vector<F>> bf_, bstar_;
  std::vector<std::vector<F>> mu_;
  std::vector<F> bsq_;
};

}  // namespace detail

/// LLL-reduce the columns of `basis` (exact integer arithmetic on the basis,
/// floating-point Gram-Schmidt). The output spans the same lattice, is
/// size-reduced (|mu| <= 0.501) and satisfies the Lovasz condition for the
/// given delta. Starts in double precision and escalates twice (long double,
/// then 113-bit software floats) when the GSO turns inconsistent; throws
/// PrecisionExhausted after that.
inline BigMatrix lll_reduce(BigMatrix basis, const LllOptions& opts = {}) {
  if (!(opts.delta > 0.25 && opts.delta < 1.0)) throw std::invalid_argument("delta must be in (0.25, 1)");
  {
    BigMatrix work = basis;
    if (detail::LllRun<double>(work, opts).run()) return work;
  }
  {
    BigMatrix work = basis;
    if (detail::LllRun<long double>(work, opts).run()) return work;
  }
  {
    BigMatrix work = basis;
    if (detail::LllRun<boost::multiprecision::cpp_bin_float_quad>(work, opts).run()) return work;
  }
  throw PrecisionExhausted();
}

inline BigMatrix lll_reduce(BigMatrix basis, double delta) {
  LllOptions opts;
  opts.delta = delta;
  return lll_reduce(std::move(basis), opts);
}

/// Deterministic Fisher-Yates permutation of the columns (splitmix64 stream).
/// Permuting basis vectors never changes the lattice they span.
inline BigMatrix shuffle_columns(const BigMatrix& basis, std::uint64_t seed) {
  const auto perm = random_permutation(static_cast<std::size_t>(basis.cols), seed);
  BigMatrix out(basis.rows, basis.cols);
  for (int j = 0; j < basis.cols; ++j) out.col[j] = basis.col[perm[j]];
  return out;
}

}  // namespace msplit
