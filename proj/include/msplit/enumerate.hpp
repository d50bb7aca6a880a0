#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "msplit/embedding.hpp"
#include "msplit/gso.hpp"
#include "msplit/instance.hpp"

namespace msplit {

enum class EnumMode { First, All };
enum class EnumStrategy { Dfs, Lds };

struct EnumConfig {
  EnumMode mode = EnumMode::All;
  EnumStrategy strategy = EnumStrategy::Dfs;
  std::optional<std::chrono::steady_clock::time_point> deadline;
  std::optional<long long> max_discrepancy;  // LDS budget cap; unbounded when absent
  bool hoelder_pruning = true;
  const std::atomic<bool>* cancel = nullptr;
};

struct EnumStats {
  std::uint64_t nodes_visited = 0;
  std::uint64_t l2_prunes = 0;
  std::uint64_t hoelder_prunes = 0;
  std::uint64_t solutions_found = 0;
  std::uint64_t descents = 0;       // tree edges taken
  std::uint64_t leaves = 0;         // full coefficient vectors reached
  std::uint64_t exact_rejects = 0;  // passed float tests, failed exact verification
  double elapsed_s = 0;
  bool exhausted = false;  // whole tree covered (never true after early stop)
  bool timed_out = false;
  bool cancelled = false;
};

/// Search-state snapshot at level t: fixed coefficients u_t..u_{K-1}, their
/// projections p_j = u_j + sum_{i>j} u_i mu_{i,j} (j >= t) and the partial
/// squared norm rho = sum_{j>=t} p_j^2 ||b*_j||^2.
struct EnumState {
  int level = 0;
  std::vector<long long> coeffs;
  std::vector<double> proj;
  double rho = 0;
};

/// Admissible L2 cut: every completion of the state keeps at least this
/// projected norm, so rho > C can never lead to a vector in the ball.
inline bool prune_l2(const EnumState& s, double C) { return s.rho > C * (1.0 + 1e-9); }

inline bool prune_l2(double rho, double C) { return rho > C * (1.0 + 1e-9); }

/// Admissible Hoelder cut with test vectors v = b*_j, j >= t: completions only
/// change components below t, so <w, b*_j> = p_j ||b*_j||^2 is already fixed,
/// while any admissible w obeys |<w, b*_j>| <= ||w||_inf ||b*_j||_1 <= r_max ||b*_j||_1.
inline bool prune_hoelder(const EnumState& s, const GsoData& g, long long r_max) {
  for (std::size_t idx = 0; idx < s.proj.size(); ++idx) {
    const int j = s.level + static_cast<int>(idx);
    if (std::fabs(s.proj[idx]) * g.bstar_sq[j] >
        static_cast<double>(r_max) * g.bstar_l1[j] * (1.0 + 1e-9))
      return true;
  }
  return false;
}

inline bool prune_hoelder_level(double p, const GsoData& g, int level, long long r_max) {
  return std::fabs(p) * g.bstar_sq[level] >
         static_cast<double>(r_max) * g.bstar_l1[level] * (1.0 + 1e-9);
}

/// Invert the box scaling: accepts w (up to global sign) iff w_0 = r_max,
/// -r_max <= w_i <= r_max and 2c_i | (w_i + r_max); then x_i = (w_i+r_max)/(2c_i),
/// optionally de-normalized by +shift.
inline std::optional<Solution> decode(const std::vector<long long>& w_in, const KernelBasis& kb,
                                      const std::vector<long long>* shift = nullptr) {
  if (static_cast<int>(w_in.size()) != kb.n + 1) return std::nullopt;
  std::vector<long long> w = w_in;
  if (w[0] == -kb.r_max)
    for (auto& v : w) v = -v;
  if (w[0] != kb.r_max) return std::nullopt;
  Solution x(kb.n);
  for (int i = 0; i < kb.n; ++i) {
    const long long wi = w[1 + i];
    if (wi < -kb.r_max || wi > kb.r_max) return std::nullopt;
    const long long num = wi + kb.r_max;
    const long long den = 2 * kb.c[i];
    if (num % den != 0) return std::nullopt;
    x[i] = num / den;
    if (shift) x[i] += (*shift)[i];
  }
  return x;
}

using SolutionSink = std::function<bool(const Solution&)>;  // return false to stop the search

namespace detail {

class EnumRun {
 public:
  EnumRun(const KernelBasis& kb, const Instance& inst, const GsoData& g, const EnumConfig& cfg,
          const SolutionSink& sink)
      : kb_(kb), inst_(inst), g_(g), cfg_(cfg), sink_(sink), K_(kb.dim()) {
    C_ = static_cast<double>(kb.n + 1) * static_cast<double>(kb.r_max) * static_cast<double>(kb.r_max);
    sig_.assign(K_ + 1, std::vector<double>(K_, 0.0));
    rho_.assign(K_ + 1, 0.0);
    wmark_.assign(K_ + 1, 0);
    u_.assign(K_, 0);
  }

  EnumStats run() {
    const auto t0 = std::chrono::steady_clock::now();
    if (cfg_.cancel && cfg_.cancel->load(std::memory_order_relaxed)) cancelled_ = true;
    if (cfg_.deadline && t0 > *cfg_.deadline) timed_out_ = true;
    if (cfg_.strategy == EnumStrategy::Dfs) {
      budget_ = -1;  // no discrepancy accounting
      descend(K_ - 1, 0, true);
      if (!stop_ && !timed_out_ && !cancelled_) stats_.exhausted = true;
    } else {
      const long long cap = cfg_.max_discrepancy.value_or(-1);
      for (long long b = 0;; ++b) {
        budget_ = b;
        cutoff_ = false;
        descend(K_ - 1, b, true);
        if (stop_ || timed_out_ || cancelled_) break;
        if (!cutoff_) {  // tree fully covered at this budget
          stats_.exhausted = true;
          break;
        }
        if (cap >= 0 && b >= cap) break;
      }
    }
    stats_.timed_out = timed_out_;
    stats_.cancelled = cancelled_;
    stats_.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return stats_;
  }

 private:
  // Children are the integers of the admissible interval, visited in order of
  // increasing distance to the real center (ties: smaller value first). Two
  // cursors walk outward from the nearest integer; |p| grows monotonically on
  // each side, so one failed probe closes that whole side.
  void descend(int t, long long remaining, bool zero_above) {
    if (stop_ || timed_out_ || cancelled_) return;
    if (t < 0) {
      leaf(remaining);
      return;
    }
    const double c_off = sig_[t + 1][t];
    const double center = -c_off;

    long long u0;
    if (zero_above) {
      u0 = 0;  // sign symmetry: the topmost nonzero coefficient is kept positive
    } else {
      const double u0f = std::ceil(center - 0.5);  // nearest integer, half-ties down
      if (!(std::fabs(u0f) < 4.0e12)) throw std::runtime_error("enumeration interval out of range");
      u0 = static_cast<long long>(u0f);
    }
    long long next_hi = u0;
    long long next_lo = u0 - 1;
    bool hi_open = true;
    bool lo_open = !zero_above;
    long long child_index = 0;

    while (hi_open || lo_open) {
      if (stop_ || timed_out_ || cancelled_) return;
      bool take_hi;
      if (!lo_open) {
        take_hi = true;
      } else if (!hi_open) {
        take_hi = false;
      } else {
        const double dh = std::fabs(static_cast<double>(next_hi) - center);
        const double dl = std::fabs(static_cast<double>(next_lo) - center);
        take_hi = dh < dl;  // tie goes to the smaller candidate
      }
      const long long uc = take_hi ? next_hi : next_lo;

      tick();
      ++stats_.nodes_visited;
      const double p = static_cast<double>(uc) + c_off;
      const double rho_t = rho_[t + 1] + p * p * g_.bstar_sq[t];
      if (prune_l2(rho_t, C_)) {
        ++stats_.l2_prunes;
        if (take_hi) hi_open = false; else lo_open = false;
        if (uc == u0) lo_open = false;  // minimal |p| already out of the ball
        continue;
      }
      if (take_hi) ++next_hi; else --next_lo;

      if (cfg_.hoelder_pruning && prune_hoelder_level(p, g_, t, kb_.r_max)) {
        ++stats_.hoelder_prunes;
        if (take_hi) hi_open = false; else lo_open = false;
        if (uc == u0) lo_open = false;
        ++child_index;  // an interval member whose subtree is cut
        continue;
      }
      // candidate is child number `child_index` in best-first order
      if (budget_ >= 0 && child_index > remaining) {
        cutoff_ = true;
        return;  // every remaining child costs at least as much
      }
      u_[t] = uc;
      for (int j = 0; j < t; ++j) sig_[t][j] = sig_[t + 1][j] + static_cast<double>(uc) * g_.mu[t][j];
      rho_[t] = rho_t;
      wmark_[t] = wmark_[t + 1] + uc * kb_.vectors[t][0];
      ++stats_.descents;
      descend(t - 1, budget_ >= 0 ? remaining - child_index : remaining, zero_above && uc == 0);
      ++child_index;
    }
  }

  void leaf(long long remaining) {
    ++stats_.leaves;
    // in LDS passes a leaf belongs to the pass that matches its discrepancy
    if (budget_ >= 0 && remaining != 0) return;
    if (wmark_[0] != kb_.r_max && wmark_[0] != -kb_.r_max) return;

    // exact reconstruction of w from the coefficients
    std::vector<long long> w(kb_.n + 1);
    for (int i = 0; i <= kb_.n; ++i) {
      __int128 acc = 0;
      for (int j = 0; j < K_; ++j) acc += static_cast<__int128>(u_[j]) * kb_.vectors[j][i];
      if (acc > INT64_MAX || acc < INT64_MIN) throw std::overflow_error("enumeration combination overflow");
      w[i] = static_cast<long long>(acc);
    }
    auto x = decode(w, kb_);
    if (!x) return;
    if (!verify_solution(inst_, *x)) {  // exact arithmetic has the final say
      ++stats_.exact_rejects;
      return;
    }
    ++stats_.solutions_found;
    if (!sink_(*x)) stop_ = true;
    if (cfg_.mode == EnumMode::First) stop_ = true;
  }

  void tick() {
    if ((++tick_ & 0x3ff) != 0) return;
    if (cfg_.cancel && cfg_.cancel->load(std::memory_order_relaxed)) cancelled_ = true;
    if (cfg_.deadline && std::chrono::steady_clock::now() > *cfg_.deadline) timed_out_ = true;
  }

  const KernelBasis& kb_;
  const Instance& inst_;
  const GsoData& g_;
  const EnumConfig& cfg_;
  const SolutionSink& sink_;
  const int K_;
  double C_ = 0;
  std::vector<std::vector<double>> sig_;
  std::vector<double> rho_;
  std::vector<long long> wmark_;
  std::vector<long long> u_;
  EnumStats stats_;
  long long budget_ = -1;
  bool cutoff_ = false;
  bool stop_ = false, timed_out_ = false, cancelled_ = false;
  std::uint64_t tick_ = 0;
};

}  // namespace detail

/// Enumerate all integer combinations w of the kernel basis with
/// w_0 = +-r_max and ||w||_inf <= r_max, decode them and emit each solution x
/// of the normalized instance exactly once. Emission happens only after exact
/// integer verification; floating-point data is used for pruning alone.
inline EnumStats enumerate(const KernelBasis& kb, const Instance& normalized, const EnumConfig& cfg,
                           const SolutionSink& sink) {
  if (kb.dim() < 1) throw std::invalid_argument("enumerate: empty kernel basis");
  const GsoData g = compute_gso(kb);
  detail::EnumRun run(kb, normalized, g, cfg, sink);
  return run.run();
}

/// Limited-discrepancy variant (iterative deepening over discrepancy budgets).
inline EnumStats lds_enumerate(const KernelBasis& kb, const Instance& normalized, EnumConfig cfg,
                               const SolutionSink& sink) {
  cfg.strategy = EnumStrategy::Lds;
  return enumerate(kb, normalized, cfg, sink);
}

inline std::pair<std::vector<Solution>, EnumStats> enumerate_collect(const KernelBasis& kb,
                                                                     const Instance& normalized,
                                                                     const EnumConfig& cfg) {
  std::vector<Solution> out;
  EnumStats st = enumerate(kb, normalized, cfg, [&](const Solution& x) {
    out.push_back(x);
    return true;
  });
  return {std::move(out), st};
}

}  // namespace msplit
