#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "msplit/embedding.hpp"
#include "msplit/enumerate.hpp"
#include "msplit/instance.hpp"
#include "msplit/lll.hpp"

namespace msplit {

enum class SolveStatus { Solved, Exhausted, Timeout, Infeasible };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Solved: return "solved";
    case SolveStatus::Exhausted: return "exhausted";
    case SolveStatus::Timeout: return "timeout";
    case SolveStatus::Infeasible: return "infeasible";
  }
  return "?";
}

struct SolveOptions {
  EnumMode mode = EnumMode::First;
  std::optional<EnumStrategy> strategy;  // default: LDS in first-mode, DFS in all-mode
  double delta = 0.99;
  bool deep_insertions = false;
  bool hoelder = true;
  std::optional<double> time_limit_s;
  std::optional<std::uint64_t> shuffle_seed;
  int restarts = 1;  // parallel shuffled pipelines, first-mode only
  std::optional<long long> max_discrepancy;

  EnumStrategy resolved_strategy() const {
    if (strategy) return *strategy;
    return mode == EnumMode::First ? EnumStrategy::Lds : EnumStrategy::Dfs;
  }
};

struct RunReport {
  std::string instance_id;
  EnumMode mode = EnumMode::First;
  EnumStrategy strategy = EnumStrategy::Lds;
  std::optional<double> first_solution_s;
  std::optional<double> all_solutions_s;
  std::optional<std::uint64_t> solution_count;  // present iff all-mode completed
  EnumStats stats;
  SolveStatus status = SolveStatus::Infeasible;
  int n_escalations = 0;
  std::optional<std::uint64_t> shuffle_seed_used;
};

namespace detail {

struct ActiveView {
  Instance inst;                  // normalized instance restricted to free variables
  std::vector<long long> shift;   // original lower bounds
  std::vector<int> active;        // indices of free variables in the original order
  int n_full = 0;
};

// Normalize to l = 0 and drop variables pinned to a single value (r' = 0);
// the embedding needs r >= 1.
inline ActiveView make_active_view(const Instance& inst) {
  auto norm = normalize_bounds(inst);
  ActiveView view;
  view.shift = std::move(norm.shift);
  view.n_full = inst.n;
  for (int j = 0; j < inst.n; ++j)
    if (norm.inst.r[j] >= 1) view.active.push_back(j);

  if (static_cast<int>(view.active.size()) == inst.n) {
    view.inst = std::move(norm.inst);
    return view;
  }
  Instance sub;
  sub.m = inst.m;
  sub.n = static_cast<int>(view.active.size());
  sub.d = norm.inst.d;
  sub.A.assign(sub.m, std::vector<long long>(sub.n));
  sub.l.assign(sub.n, 0);
  sub.r.resize(sub.n);
  for (int k = 0; k < sub.n; ++k) {
    for (int i = 0; i < sub.m; ++i) sub.A[i][k] = norm.inst.A[i][view.active[k]];
    sub.r[k] = norm.inst.r[view.active[k]];
  }
  view.inst = std::move(sub);
  return view;
}

inline Solution expand_solution(const ActiveView& view, const Solution& x_active) {
  Solution full(view.n_full, 0);
  for (std::size_t k = 0; k < view.active.size(); ++k) full[view.active[k]] = x_active[k];
  for (int j = 0; j < view.n_full; ++j) full[j] += view.shift[j];
  return full;
}

struct PipelineResult {
  EnumStats stats;
  int n_escalations = 0;
  bool timed_out_in_reduction = false;
};

// normalize -> choose_N -> build_embedding -> (shuffle) -> LLL -> kernel
// (one N^2 escalation on dimension mismatch) -> enumerate.
inline PipelineResult run_pipeline(const ActiveView& view, const SolveOptions& opts,
                                   std::optional<std::uint64_t> shuffle_seed,
                                   std::optional<std::chrono::steady_clock::time_point> deadline,
                                   const std::atomic<bool>* cancel, const SolutionSink& sink) {
  PipelineResult res;
  const Instance& inst = view.inst;
  mpz_class N = choose_N(inst);

  KernelBasis kb;
  try {
    for (int attempt = 0;; ++attempt) {
      EmbeddingBasis emb = build_embedding(inst, N);
      BigMatrix basis = shuffle_seed ? shuffle_columns(emb.basis, *shuffle_seed) : std::move(emb.basis);
      LllOptions lll_opts;
      lll_opts.delta = opts.delta;
      lll_opts.deep_insertions = opts.deep_insertions;
      lll_opts.deadline = deadline;
      emb.basis = lll_reduce(std::move(basis), lll_opts);
      try {
        kb = extract_kernel(emb, inst.m);
        break;
      } catch (const KernelDimensionMismatch&) {
        if (attempt >= 1) throw;
        N = N * N;
        ++res.n_escalations;
      }
    }
  } catch (const PipelineTimeout&) {
    res.timed_out_in_reduction = true;
    res.stats.timed_out = true;
    return res;
  }

  EnumConfig cfg;
  cfg.mode = opts.mode;
  cfg.strategy = opts.resolved_strategy();
  cfg.deadline = deadline;
  cfg.max_discrepancy = opts.max_discrepancy;
  cfg.hoelder_pruning = opts.hoelder;
  cfg.cancel = cancel;
  res.stats = enumerate(kb, inst, cfg, sink);
  return res;
}

}  // namespace detail

/// Solve the instance end to end. Solutions are emitted through the sink in
/// original coordinates (de-normalized); every emission has already passed
/// exact verification. With restarts > 1 (first-mode only), that many
/// pipelines run in parallel on randomly shuffled bases and the first
/// verified solution cancels the rest.
inline RunReport solve(const Instance& inst, const SolveOptions& opts, const SolutionSink& sink,
                       const std::string& instance_id = "") {
  validate_instance(inst);
  if (opts.restarts < 1) throw std::invalid_argument("restarts must be >= 1");
  if (opts.restarts > 1 && opts.mode != EnumMode::First)
    throw std::invalid_argument("restarts apply to first-mode only");
  if (opts.max_discrepancy && opts.mode == EnumMode::All)
    throw std::invalid_argument("a discrepancy cap would make all-mode incomplete");

  const auto t0 = std::chrono::steady_clock::now();
  std::optional<std::chrono::steady_clock::time_point> deadline;
  if (opts.time_limit_s)
    deadline = t0 + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                        std::chrono::duration<double>(*opts.time_limit_s));

  RunReport rep;
  rep.instance_id = instance_id;
  rep.mode = opts.mode;
  rep.strategy = opts.resolved_strategy();
  rep.shuffle_seed_used = opts.shuffle_seed;

  const detail::ActiveView view = detail::make_active_view(inst);

  // all variables pinned: the only candidate is x = l
  if (view.inst.n == 0 || view.active.empty()) {
    Solution candidate(inst.n);
    for (int j = 0; j < inst.n; ++j) candidate[j] = view.shift[j];
    const bool ok = verify_solution(inst, candidate);
    if (ok) {
      ++rep.stats.solutions_found;
      sink(candidate);
      rep.first_solution_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    rep.stats.exhausted = true;
    rep.status = ok ? (opts.mode == EnumMode::First ? SolveStatus::Solved : SolveStatus::Exhausted)
                    : SolveStatus::Infeasible;
    if (opts.mode == EnumMode::All) {
      rep.solution_count = rep.stats.solutions_found;
      rep.all_solutions_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    return rep;
  }
  if (view.inst.m > view.inst.n)
    throw std::invalid_argument("system has more equations than free variables; not supported");

  std::mutex sink_mutex;
  bool any_emitted = false;
  auto guarded_sink = [&](const Solution& x_active) {
    const Solution full = detail::expand_solution(view, x_active);
    if (!verify_solution(inst, full))
      throw std::logic_error("internal error: emitted solution fails exact verification");
    std::lock_guard<std::mutex> lock(sink_mutex);
    if (!any_emitted) {
      any_emitted = true;
      rep.first_solution_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    return sink(full);
  };

  if (opts.restarts == 1) {
    const auto res = detail::run_pipeline(view, opts, opts.shuffle_seed, deadline, nullptr, guarded_sink);
    rep.stats = res.stats;
    rep.n_escalations = res.n_escalations;
  } else {
    // K restart pipelines, distinct shuffle seeds, shared cancellation
    const std::uint64_t base_seed = opts.shuffle_seed.value_or(1);
    std::atomic<bool> cancel{false};
    std::vector<detail::PipelineResult> results(opts.restarts);
    std::vector<std::exception_ptr> errors(opts.restarts);
    std::vector<std::thread> threads;
    std::atomic<int> winner{-1};
    for (int i = 0; i < opts.restarts; ++i) {
      threads.emplace_back([&, i] {
        auto racing_sink = [&](const Solution& x) {
          int expected = -1;
          if (winner.compare_exchange_strong(expected, i)) {
            guarded_sink(x);
            cancel.store(true, std::memory_order_relaxed);
          }
          return false;
        };
        SolveOptions local = opts;
        local.restarts = 1;
        try {
          results[i] = detail::run_pipeline(view, local, base_seed + static_cast<std::uint64_t>(i),
                                            deadline, &cancel, racing_sink);
        } catch (...) {
          errors[i] = std::current_exception();
          cancel.store(true, std::memory_order_relaxed);
        }
      });
    }
    for (auto& th : threads) th.join();
    const int w = winner.load();
    if (w < 0)  // a hard failure only matters when nothing was found
      for (int i = 0; i < opts.restarts; ++i)
        if (errors[i]) std::rethrow_exception(errors[i]);
    int pick = w;
    if (pick < 0) {  // no solution: prefer a pipeline that proved exhaustion
      for (int i = 0; i < opts.restarts && pick < 0; ++i)
        if (results[i].stats.exhausted) pick = i;
      if (pick < 0) pick = 0;
    }
    rep.stats = results[pick].stats;
    rep.n_escalations = results[pick].n_escalations;
    rep.shuffle_seed_used = base_seed + static_cast<std::uint64_t>(pick);
  }

  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const bool found = any_emitted;
  if (opts.mode == EnumMode::First) {
    if (found) rep.status = SolveStatus::Solved;
    else if (rep.stats.exhausted) rep.status = SolveStatus::Infeasible;
    else rep.status = SolveStatus::Timeout;
  } else {
    if (rep.stats.exhausted) {
      rep.status = found ? SolveStatus::Exhausted : SolveStatus::Infeasible;
      rep.solution_count = rep.stats.solutions_found;
      rep.all_solutions_s = elapsed;
    } else {
      rep.status = SolveStatus::Timeout;
    }
  }
  return rep;
}

inline std::pair<std::vector<Solution>, RunReport> solve_collect(const Instance& inst,
                                                                 const SolveOptions& opts,
                                                                 const std::string& id = "") {
  std::vector<Solution> sols;
  RunReport rep = solve(inst, opts, [&](const Solution& x) {
    sols.push_back(x);
    return true;
  }, id);
  return {std::move(sols), rep};
}

}  // namespace msplit
