// Acceptance suite: end-to-end checks of the solver against independent
// references. Prints one [PASS]/[FAIL]/[SKIP] line per criterion; the exit
// code is the number of failed criteria.
//
// Criterion 2 needs the QOBLIB market split instances converted to the CD
// format (see README.md). Point MSPLIT_QOBLIB_DIR at the directory holding
// ms_<m>_<D>_<k>.cd (or .dat) files; without it that criterion is reported
// as SKIP/BLOCKED.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "msplit/msplit.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using namespace msplit;
using test_support::sorted;

namespace {

int g_failures = 0;

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

void report(int criterion, const std::string& name, bool pass, const std::string& detail) {
  std::cout << (pass ? "[PASS] " : "[FAIL] ") << "criterion " << criterion << ": " << name;
  if (!detail.empty()) std::cout << " — " << detail;
  std::cout << std::endl;
  if (!pass) ++g_failures;
}

void report_skip(int criterion, const std::string& name, const std::string& reason) {
  std::cout << "[SKIP] criterion " << criterion << ": " << name << " — " << reason << std::endl;
}

struct CorpusEntry {
  std::string id;
  Instance inst;
};

// 100 generated instances over m in {2,3,4}, D in {10,50}, planted and not.
std::vector<CorpusEntry> generated_corpus() {
  std::vector<CorpusEntry> corpus;
  int emitted = 0;
  std::uint64_t seed = 1000;
  while (emitted < 100) {
    for (int m : {2, 3, 4}) {
      for (long long D : {10, 50}) {
        for (bool plant : {false, true}) {
          if (emitted >= 100) break;
          std::ostringstream id;
          id << "gen(m=" << m << ",D=" << D << ",seed=" << seed << (plant ? ",planted" : "") << ")";
          corpus.push_back({id.str(), generate_cd(m, D, seed, plant)});
          ++seed;
          ++emitted;
        }
      }
    }
  }
  return corpus;
}

// Small bases with m <= 3, n <= 10 for the exact-rational reduction checks.
std::vector<CorpusEntry> small_corpus() {
  std::vector<CorpusEntry> corpus;
  corpus.push_back({"toy(1x2)", test_support::make_instance({{1, 1}}, {1})});
  corpus.push_back({"parity(1x2)", test_support::make_instance({{2, 2}}, {1})});
  corpus.push_back({"bounds(1x2,r=(1,2))",
                    test_support::make_instance({{1, 1}}, {2}, {0, 0}, {1, 2})});
  corpus.push_back({"gen(m=2,D=10)", generate_cd(2, 10, 77, false)});
  corpus.push_back({"gen(m=2,D=50,planted)", generate_cd(2, 50, 78, true)});
  SplitMix64 rng(4242);
  for (int iter = 0; iter < 10; ++iter) {
    const int m = 1 + static_cast<int>(rng.below(3));
    const int n = m + 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(11 - m)));
    std::ostringstream id;
    id << "small(" << m << "x" << n << "#" << iter << ")";
    corpus.push_back({id.str(), test_support::random_small_instance(rng, m, n, 25, iter % 2 == 0)});
  }
  return corpus;
}

struct PipelineData {
  KernelBasis kb;
  int escalations = 0;
};

PipelineData reduce_and_extract(const Instance& inst) {
  PipelineData out;
  mpz_class N = choose_N(inst);
  for (int attempt = 0;; ++attempt) {
    auto emb = build_embedding(inst, N);
    emb.basis = lll_reduce(emb.basis);
    try {
      out.kb = extract_kernel(emb, inst.m);
      return out;
    } catch (const KernelDimensionMismatch&) {
      if (attempt >= 1) throw;
      N = N * N;
      ++out.escalations;
    }
  }
}

std::vector<Solution> enum_all(const KernelBasis& kb, const Instance& inst, EnumStrategy strategy,
                               bool hoelder, EnumStats* stats_out = nullptr) {
  EnumConfig cfg;
  cfg.mode = EnumMode::All;
  cfg.strategy = strategy;
  cfg.hoelder_pruning = hoelder;
  auto [sols, stats] = enumerate_collect(kb, inst, cfg);
  if (!stats.exhausted) throw std::runtime_error("enumeration did not finish");
  if (stats_out) *stats_out = stats;
  return sorted(std::move(sols));
}

// ---- criterion 2 support -------------------------------------------------

struct QoblibClass {
  int m;
  long long D;
  std::vector<std::uint64_t> counts;  // lexicographic file order
  double paper_all_seconds;           // 0.00 entries mean "< 0.5 s"
};

std::vector<fs::path> qoblib_files(const fs::path& dir, int m, long long D) {
  std::ostringstream prefix;
  prefix << "ms_" << std::setw(2) << std::setfill('0') << m << "_" << std::setw(3) << D << "_";
  std::vector<fs::path> files;
  if (!fs::exists(dir)) return files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    const auto ext = entry.path().extension().string();
    if (name.rfind(prefix.str(), 0) == 0 && (ext == ".cd" || ext == ".dat")) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

void criterion2(const fs::path& dir) {
  const std::string name = "benchmark reference counts";
  const std::vector<QoblibClass> classes = {
      {3, 50, {1, 3, 1, 2}, 0.5},
      {5, 50, {23, 14, 16, 14}, 0.5},
      {7, 100, {1, 4, 2, 1}, 5.50},
  };
  bool have_all = true;
  for (const auto& cls : classes)
    if (qoblib_files(dir, cls.m, cls.D).size() != 4) have_all = false;
  if (!have_all) {
    report_skip(2, name,
                "BLOCKED: QOBLIB CD files not found under '" + dir.string() +
                    "' (expected ms_<mm>_<DDD>_*.cd, four per class); convert the QOBLIB market "
                    "split instances and set MSPLIT_QOBLIB_DIR to run this criterion");
    return;
  }
  bool pass = true;
  std::ostringstream detail;
  for (const auto& cls : classes) {
    const auto files = qoblib_files(dir, cls.m, cls.D);
    double total_s = 0;
    std::vector<std::uint64_t> counts;
    for (const auto& f : files) {
      std::ifstream in(f);
      const Instance inst = parse_instance(in);
      SolveOptions opts;
      opts.mode = EnumMode::All;
      opts.time_limit_s = 10 * cls.paper_all_seconds * 4;  // generous per-instance ceiling
      auto [sols, rep] = solve_collect(inst, opts, f.string());
      if (!rep.solution_count) {
        pass = false;
        detail << f.filename().string() << ": " << to_string(rep.status) << "; ";
        counts.push_back(0);
        continue;
      }
      counts.push_back(*rep.solution_count);
      total_s += rep.all_solutions_s.value_or(0.0);
    }
    if (counts != cls.counts) {
      pass = false;
      detail << "(" << cls.m << "," << 10 * (cls.m - 1) << "," << cls.D << ") counts mismatch; ";
    }
    const double avg = total_s / 4.0;
    if (avg > 10 * cls.paper_all_seconds) {
      pass = false;
      detail << "(" << cls.m << "," << cls.D << ") avg " << avg << "s exceeds 10x reference; ";
    }
  }
  report(2, name, pass, pass ? "counts and timing within 10x reference" : detail.str());
}

}  // namespace

int main(int argc, char** argv) {
  std::cout << "msplit acceptance suite" << std::endl;

  fs::path qoblib_dir = "data/qoblib";
  if (const char* env = std::getenv("MSPLIT_QOBLIB_DIR")) qoblib_dir = env;
  if (argc > 1) qoblib_dir = argv[1];

  const auto corpus = generated_corpus();
  const auto smalls = small_corpus();

  // ---- criterion 1: oracle equivalence on the generated corpus ----
  {
    Timer timer;
    int ok = 0, total = 0;
    std::ostringstream detail;
    bool pass = true;
    for (const auto& entry : corpus) {
      ++total;
      try {
        const auto lattice = test_support::lattice_all(entry.inst);
        const auto oracle = sorted(mitm_enumerate(entry.inst));
        if (lattice == oracle) {
          ++ok;
        } else {
          pass = false;
          detail << entry.id << ": lattice " << lattice.size() << " vs oracle " << oracle.size() << "; ";
        }
      } catch (const std::exception& e) {
        pass = false;
        detail << entry.id << ": " << e.what() << "; ";
      }
    }
    std::ostringstream d;
    d << ok << "/" << total << " instance sets equal (" << std::fixed << std::setprecision(1)
      << timer.seconds() << " s)";
    report(1, "oracle equivalence", pass, pass ? d.str() : d.str() + " " + detail.str());
  }

  // ---- criterion 2: reference counts on QOBLIB data ----
  criterion2(qoblib_dir);

  // ---- criterion 3: first-solution capability on planted instances ----
  {
    Timer timer;
    bool pass = true;
    std::ostringstream detail;
    double worst = 0;
    for (int m = 2; m <= 7; ++m) {
      for (long long D : {50, 100, 200}) {
        const Instance inst = generate_cd(m, D, 42 + m, true);
        SolveOptions opts;
        opts.mode = EnumMode::First;
        opts.time_limit_s = 120.0;
        auto [sols, rep] = solve_collect(inst, opts);
        const double t = rep.first_solution_s.value_or(1e9);
        worst = std::max(worst, t);
        if (rep.status != SolveStatus::Solved || t > 120.0) {
          pass = false;
          detail << "(m=" << m << ",D=" << D << "): " << to_string(rep.status) << " after " << t << "s; ";
        } else if (sols.empty() || !verify_solution(inst, sols[0])) {
          pass = false;
          detail << "(m=" << m << ",D=" << D << "): unverified solution; ";
        }
      }
    }
    std::ostringstream d;
    d << "18 planted runs m<=7, worst first-solution " << std::fixed << std::setprecision(2) << worst
      << " s (budget 120 s, total " << std::setprecision(1) << timer.seconds() << " s)";
    report(3, "first-solution capability", pass, pass ? d.str() : detail.str());
  }

  // ---- criterion 4: LLL invariants against exact-rational GSO ----
  {
    Timer timer;
    bool pass = true;
    std::ostringstream detail;
    int checked = 0;
    for (const auto& entry : smalls) {
      if (entry.inst.m > 3 || entry.inst.n > 10) continue;
      try {
        const auto emb = build_embedding(entry.inst, choose_N(entry.inst));
        const BigMatrix out = lll_reduce(emb.basis);
        if (determinant(gram_matrix(out)) != determinant(gram_matrix(emb.basis))) {
          pass = false;
          detail << entry.id << ": Gram determinant changed; ";
        }
        const auto gso = test_support::rational_gso(out);
        const mpq_class mu_limit(501, 1000);
        const mpq_class delta(99, 100);
        const mpq_class tol = 1 + mpq_class(1, 1000000000);
        for (int i = 0; i < out.cols && pass; ++i)
          for (int j = 0; j < i; ++j)
            if (abs(gso.mu[i][j]) > mu_limit) {
              pass = false;
              detail << entry.id << ": |mu| > 0.501; ";
              break;
            }
        for (int k = 1; k < out.cols && pass; ++k) {
          const mpq_class lhs = delta * gso.bstar_sq[k - 1];
          const mpq_class rhs =
              gso.bstar_sq[k] + gso.mu[k][k - 1] * gso.mu[k][k - 1] * gso.bstar_sq[k - 1];
          if (lhs > rhs * tol) {
            pass = false;
            detail << entry.id << ": Lovasz violated at " << k << "; ";
          }
        }
        ++checked;
      } catch (const std::exception& e) {
        pass = false;
        detail << entry.id << ": " << e.what() << "; ";
      }
    }
    std::ostringstream d;
    d << checked << " bases checked exactly (" << std::fixed << std::setprecision(1) << timer.seconds()
      << " s)";
    report(4, "LLL invariant suite", pass, pass ? d.str() : detail.str());
  }

  // ---- criteria 5-8 share one pipeline pass over the corpus ----
  {
    Timer timer;
    bool pass5 = true, pass6 = true, pass7 = true, pass8 = true;
    std::ostringstream d5, d6, d7, d8;
    int n_instances = 0;

    std::vector<CorpusEntry> joint = smalls;
    joint.insert(joint.end(), corpus.begin(), corpus.end());

    for (const auto& entry : joint) {
      const Instance& inst = entry.inst;
      bool zero_one = true;
      for (int j = 0; j < inst.n; ++j) zero_one &= inst.l[j] == 0 && inst.r[j] == 1;
      try {
        // criterion 5: kernel dimension with at most one escalation + exact residual
        const auto pd = reduce_and_extract(inst);
        if (pd.kb.dim() != inst.n - inst.m + 1) {
          pass5 = false;
          d5 << entry.id << ": dim " << pd.kb.dim() << "; ";
        }
        if (!kernel_basis_solves_extended(inst, pd.kb)) {
          pass5 = false;
          d5 << entry.id << ": nonzero residual; ";
        }

        // criterion 6: Hoelder A/B
        EnumStats st_on, st_off;
        const auto s_on = enum_all(pd.kb, inst, EnumStrategy::Dfs, true, &st_on);
        const auto s_off = enum_all(pd.kb, inst, EnumStrategy::Dfs, false, &st_off);
        if (s_on != s_off) {
          pass6 = false;
          d6 << entry.id << ": sets differ; ";
        }
        if (st_on.nodes_visited > st_off.nodes_visited) {
          pass6 = false;
          d6 << entry.id << ": hoelder-on visited more nodes; ";
        }

        // criterion 7: LDS/DFS agreement + budget-0 single path
        const auto s_lds = enum_all(pd.kb, inst, EnumStrategy::Lds, true);
        if (s_lds != s_on) {
          pass7 = false;
          d7 << entry.id << ": lds set differs; ";
        }
        EnumConfig greedy;
        greedy.strategy = EnumStrategy::Lds;
        greedy.max_discrepancy = 0;
        auto [gsols, gstats] = enumerate_collect(pd.kb, inst, greedy);
        if (gstats.descents > static_cast<std::uint64_t>(pd.kb.dim()) || gstats.leaves > 1) {
          pass7 = false;
          d7 << entry.id << ": budget-0 explored more than one path; ";
        }

        // criterion 8: decode round trip through the kernel span (0/1 corpus)
        if (zero_one) {
          const auto oracle = mitm_enumerate(inst);
          const BigMatrix kmat = test_support::kernel_as_matrix(pd.kb);
          for (const auto& x : oracle) {
            std::vector<long long> w(inst.n + 1);
            w[0] = pd.kb.r_max;
            for (int i = 0; i < inst.n; ++i) w[1 + i] = 2 * pd.kb.c[i] * x[i] - pd.kb.r_max;
            std::vector<mpz_class> wz(w.size());
            for (std::size_t i = 0; i < w.size(); ++i) wz[i] = to_mpz(w[i]);
            const auto u = test_support::solve_exact(kmat, wz);
            if (!u || !test_support::is_integral(*u)) {
              pass8 = false;
              d8 << entry.id << ": encoded solution outside the kernel span; ";
              break;
            }
            const auto back = decode(w, pd.kb);
            if (!back || *back != x) {
              pass8 = false;
              d8 << entry.id << ": decode(encode(x)) != x; ";
              break;
            }
          }
        }
        ++n_instances;
      } catch (const std::exception& e) {
        pass5 = false;
        d5 << entry.id << ": " << e.what() << "; ";
      }
    }

    std::ostringstream base;
    base << n_instances << " corpus instances (" << std::fixed << std::setprecision(1) << timer.seconds()
         << " s)";
    report(5, "kernel correctness", pass5, pass5 ? base.str() : d5.str());
    report(6, "pruning admissibility A/B", pass6, pass6 ? base.str() : d6.str());
    report(7, "LDS/DFS agreement", pass7, pass7 ? base.str() : d7.str());
    report(8, "decode round trip", pass8, pass8 ? base.str() : d8.str());
  }

  std::cout << (g_failures == 0 ? "all criteria passed" : "FAILURES: " + std::to_string(g_failures))
            << std::endl;
  return g_failures;
}
