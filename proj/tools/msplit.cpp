// msplit: solve bounded linear Diophantine systems A*x = d, l <= x <= r by
// lattice reduction and exhaustive kernel enumeration. Subcommands: solve,
// gen, bench, verify, oracle. See README.md for the file formats.

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "msplit/msplit.hpp"

namespace {

using msplit::EnumMode;
using msplit::EnumStrategy;
using msplit::Instance;
using msplit::Solution;
using msplit::SolveStatus;

constexpr int kExitSolved = 0;
constexpr int kExitInfeasible = 1;
constexpr int kExitTimeout = 2;
constexpr int kExitInputError = 3;

int exit_code_for(SolveStatus s) {
  switch (s) {
    case SolveStatus::Solved:
    case SolveStatus::Exhausted: return kExitSolved;
    case SolveStatus::Infeasible: return kExitInfeasible;
    case SolveStatus::Timeout: return kExitTimeout;
  }
  return kExitInputError;
}

Instance load_instance(const std::string& path) {
  if (path == "-") return msplit::parse_instance(std::cin);
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file: " + path);
  return msplit::parse_instance(in);
}

std::string format_solution(const Solution& x) {
  std::ostringstream out;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (j) out << ' ';
    out << x[j];
  }
  return out.str();
}

nlohmann::ordered_json report_json(const msplit::RunReport& rep) {
  nlohmann::ordered_json j;
  j["instance"] = rep.instance_id;
  j["mode"] = rep.mode == EnumMode::First ? "first" : "all";
  j["strategy"] = rep.strategy == EnumStrategy::Lds ? "lds" : "dfs";
  j["status"] = msplit::to_string(rep.status);
  if (rep.first_solution_s) j["first_solution_seconds"] = *rep.first_solution_s;
  if (rep.all_solutions_s) j["all_solutions_seconds"] = *rep.all_solutions_s;
  if (rep.solution_count) j["solution_count"] = *rep.solution_count;
  j["stats"] = {{"nodes_visited", rep.stats.nodes_visited},
                {"l2_prunes", rep.stats.l2_prunes},
                {"hoelder_prunes", rep.stats.hoelder_prunes},
                {"solutions_found", rep.stats.solutions_found},
                {"elapsed_seconds", rep.stats.elapsed_s},
                {"complete", rep.stats.exhausted}};
  j["n_escalations"] = rep.n_escalations;
  if (rep.shuffle_seed_used) j["shuffle_seed"] = *rep.shuffle_seed_used;
  return j;
}

void print_report_text(std::ostream& os, const msplit::RunReport& rep) {
  os << "status: " << msplit::to_string(rep.status);
  if (rep.solution_count) os << "  solutions: " << *rep.solution_count;
  if (rep.first_solution_s) os << "  first: " << std::fixed << std::setprecision(3) << *rep.first_solution_s << "s";
  if (rep.all_solutions_s) os << "  all: " << std::fixed << std::setprecision(3) << *rep.all_solutions_s << "s";
  os << "  nodes: " << rep.stats.nodes_visited << "  l2-prunes: " << rep.stats.l2_prunes
     << "  hoelder-prunes: " << rep.stats.hoelder_prunes << "\n";
}

struct SolveArgs {
  std::string path;
  bool all = false;
  std::string strategy;
  double delta = 0.99;
  std::optional<double> time_limit;
  std::optional<std::uint64_t> shuffle_seed;
  int restarts = 1;
  bool no_hoelder = false;
  bool deep = false;
  std::optional<long long> max_discrepancy;
  bool json = false;
};

int cmd_solve(const SolveArgs& args) {
  Instance inst = load_instance(args.path);
  msplit::SolveOptions opts;
  opts.mode = args.all ? EnumMode::All : EnumMode::First;
  if (args.strategy == "dfs") opts.strategy = EnumStrategy::Dfs;
  else if (args.strategy == "lds") opts.strategy = EnumStrategy::Lds;
  else if (!args.strategy.empty()) throw CLI::ValidationError("--strategy must be dfs or lds");
  opts.delta = args.delta;
  opts.time_limit_s = args.time_limit;
  opts.shuffle_seed = args.shuffle_seed;
  opts.restarts = args.restarts;
  opts.hoelder = !args.no_hoelder;
  opts.deep_insertions = args.deep;
  opts.max_discrepancy = args.max_discrepancy;

  std::vector<Solution> collected;
  msplit::SolutionSink sink;
  if (args.json) {
    sink = [&](const Solution& x) {
      collected.push_back(x);
      return true;
    };
  } else {
    sink = [&](const Solution& x) {
      std::cout << format_solution(x) << "\n" << std::flush;
      return true;
    };
  }
  const msplit::RunReport rep = msplit::solve(inst, opts, sink, args.path);
  if (args.json) {
    auto j = report_json(rep);
    auto sols = nlohmann::ordered_json::array();
    for (const auto& x : collected) sols.push_back(x);
    j["solutions"] = std::move(sols);
    std::cout << j.dump(2) << "\n";
  } else {
    print_report_text(std::cerr, rep);
  }
  return exit_code_for(rep.status);
}

struct GenArgs {
  int m = 0;
  long long D = 0;
  std::uint64_t seed = 0;
  bool plant = false;
  std::string out = "-";
  std::string solution_out;
};

int cmd_gen(const GenArgs& args) {
  Solution planted;
  Instance inst = msplit::generate_cd(args.m, args.D, args.seed, args.plant, &planted);
  const std::string text = msplit::serialize_instance(inst);
  if (args.out == "-") {
    std::cout << text;
  } else {
    std::ofstream out(args.out);
    if (!out) throw std::runtime_error("cannot write " + args.out);
    out << text;
  }
  if (args.plant) {
    if (!args.solution_out.empty()) {
      std::ofstream sol(args.solution_out);
      if (!sol) throw std::runtime_error("cannot write " + args.solution_out);
      sol << format_solution(planted) << "\n";
    } else {
      std::cerr << "planted: " << format_solution(planted) << "\n";
    }
  }
  return 0;
}

struct BenchArgs {
  std::vector<std::string> classes;
  int count = 4;
  std::uint64_t seed = 1;
  bool plant = false;
  bool first_only = false;
  bool check_oracle = false;
  std::optional<double> time_limit;
  std::string csv;
};

struct BenchRow {
  int m, n;
  long long D;
  std::uint64_t seed;
  std::optional<double> first_s, all_s;
  std::optional<std::uint64_t> count;
  std::string status;
  msplit::EnumStats stats;
};

int cmd_bench(const BenchArgs& args) {
  std::vector<std::pair<int, long long>> classes;
  for (const auto& spec : args.classes) {
    int m = 0;
    long long D = 0;
    char sep = 0;
    std::istringstream in(spec);
    if (!(in >> m >> sep >> D) || (sep != ',' && sep != ':') || m < 2 || D < 1)
      throw CLI::ValidationError("--class expects m,D with m >= 2 and D >= 1, got '" + spec + "'");
    classes.emplace_back(m, D);
  }

  std::vector<std::vector<BenchRow>> per_class(classes.size());
  bool any_mismatch = false;

  for (std::size_t ci = 0; ci < classes.size(); ++ci) {
    const auto [m, D] = classes[ci];
    for (int k = 0; k < args.count; ++k) {
      const std::uint64_t seed = args.seed + static_cast<std::uint64_t>(k);
      Instance inst = msplit::generate_cd(m, D, seed, args.plant);
      BenchRow row{m, inst.n, D, seed, {}, {}, {}, "", {}};

      msplit::SolveOptions fopts;
      fopts.mode = EnumMode::First;
      fopts.time_limit_s = args.time_limit;
      auto [fsols, frep] = msplit::solve_collect(inst, fopts);
      row.first_s = frep.first_solution_s;
      row.status = msplit::to_string(frep.status);

      if (!args.first_only) {
        msplit::SolveOptions aopts;
        aopts.mode = EnumMode::All;
        aopts.time_limit_s = args.time_limit;
        auto [asols, arep] = msplit::solve_collect(inst, aopts);
        row.all_s = arep.all_solutions_s;
        row.count = arep.solution_count;
        row.stats = arep.stats;
        row.status = msplit::to_string(arep.status);
        if (args.check_oracle && inst.n <= 44) {
          const std::uint64_t oracle = msplit::mitm_count(inst);
          if (!row.count || *row.count != oracle) {
            row.status = "MISMATCH(oracle=" + std::to_string(oracle) + ")";
            any_mismatch = true;
          }
        }
      }
      per_class[ci].push_back(std::move(row));
    }
  }

  // text table, one row per class
  std::cout << std::left << std::setw(16) << "Class" << std::right << std::setw(12) << "First (sec)"
            << std::setw(12) << "All (sec)" << "  " << std::left << "Number of solutions\n";
  for (std::size_t ci = 0; ci < classes.size(); ++ci) {
    const auto& rows = per_class[ci];
    if (rows.empty()) continue;
    const auto [m, D] = classes[ci];
    std::ostringstream cls;
    cls << "(" << m << "," << rows.front().n << "," << D << ")";
    double first_sum = 0, all_sum = 0;
    bool first_ok = true, all_ok = true;
    std::ostringstream counts;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      if (rows[k].first_s) first_sum += *rows[k].first_s; else first_ok = false;
      if (rows[k].all_s) all_sum += *rows[k].all_s; else all_ok = false;
      if (k) counts << ", ";
      if (rows[k].count) counts << *rows[k].count; else counts << "--";
      if (rows[k].status.rfind("MISMATCH", 0) == 0) counts << "!";
    }
    std::cout << std::left << std::setw(16) << cls.str() << std::right << std::setw(12) << std::fixed
              << std::setprecision(2) << (first_ok ? first_sum / rows.size() : -1.0) << std::setw(12)
              << (all_ok ? all_sum / rows.size() : -1.0) << "  " << std::left << counts.str() << "\n";
  }

  if (!args.csv.empty()) {
    std::ofstream csv(args.csv);
    if (!csv) throw std::runtime_error("cannot write " + args.csv);
    csv << "m,n,D,seed,first_seconds,all_seconds,solutions,status,nodes,l2_prunes,hoelder_prunes\n";
    for (const auto& rows : per_class)
      for (const auto& r : rows) {
        csv << r.m << ',' << r.n << ',' << r.D << ',' << r.seed << ',';
        if (r.first_s) csv << *r.first_s;
        csv << ',';
        if (r.all_s) csv << *r.all_s;
        csv << ',';
        if (r.count) csv << *r.count;
        csv << ',' << r.status << ',' << r.stats.nodes_visited << ',' << r.stats.l2_prunes << ','
            << r.stats.hoelder_prunes << "\n";
      }
  }
  return any_mismatch ? 1 : 0;
}

int cmd_verify(const std::string& inst_path, const std::string& sol_path) {
  Instance inst = load_instance(inst_path);
  std::ifstream in(sol_path);
  if (!in) throw std::runtime_error("cannot open solutions file: " + sol_path);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line(raw);
    if (auto pos = line.find('#'); pos != std::string_view::npos) line = line.substr(0, pos);
    std::istringstream tokens{std::string(line)};
    Solution x;
    long long v;
    while (tokens >> v) x.push_back(v);
    if (x.empty()) continue;
    if (static_cast<int>(x.size()) != inst.n) {
      std::cerr << "line " << lineno << ": expected " << inst.n << " values, got " << x.size() << "\n";
      return kExitInputError;
    }
    if (!msplit::verify_solution(inst, x)) {
      std::cerr << "line " << lineno << ": not a solution\n";
      return kExitInfeasible;
    }
  }
  return 0;
}

int cmd_oracle(const std::string& path, bool count_only, bool compare) {
  Instance inst = load_instance(path);
  const auto norm = msplit::normalize_bounds(inst);
  if (count_only) {
    std::cout << msplit::mitm_count(norm.inst) << "\n";
    return 0;
  }
  auto sols = msplit::mitm_enumerate(norm.inst);
  for (auto& x : sols)
    for (int j = 0; j < inst.n; ++j) x[j] += norm.shift[j];
  std::sort(sols.begin(), sols.end());
  if (!compare) {
    for (const auto& x : sols) std::cout << format_solution(x) << "\n";
    return 0;
  }
  msplit::SolveOptions opts;
  opts.mode = EnumMode::All;
  auto [lattice, rep] = msplit::solve_collect(inst, opts, path);
  std::sort(lattice.begin(), lattice.end());
  if (lattice == sols) {
    std::cout << "match: " << sols.size() << " solutions\n";
    return 0;
  }
  std::cout << "MISMATCH: oracle " << sols.size() << " solutions, lattice " << lattice.size() << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lattice-based solver for bounded linear Diophantine systems (market split)"};
  app.require_subcommand(1);

  SolveArgs sargs;
  auto* solve = app.add_subcommand("solve", "solve an instance file");
  solve->add_option("instance", sargs.path, "CD-format instance file, or - for stdin")->required();
  auto* all_flag = solve->add_flag("--all", sargs.all, "enumerate all solutions (default: first only)");
  solve->add_flag("--first", "stop at the first solution (default)")->excludes(all_flag);
  solve->add_option("--strategy", sargs.strategy, "dfs or lds (default: lds for --first, dfs for --all)");
  solve->add_option("--delta", sargs.delta, "LLL reduction quality in (0.25, 1)")->default_val(0.99);
  solve->add_option("--time-limit", sargs.time_limit, "wall-clock limit in seconds");
  solve->add_option("--shuffle-seed", sargs.shuffle_seed, "shuffle the basis columns before reduction");
  solve->add_option("--restarts", sargs.restarts, "parallel shuffled pipelines (first-mode)")->default_val(1);
  solve->add_flag("--no-hoelder", sargs.no_hoelder, "disable Hoelder pruning");
  solve->add_flag("--deep", sargs.deep, "experimental deep insertions in LLL");
  solve->add_option("--max-discrepancy", sargs.max_discrepancy, "cap the LDS discrepancy budget");
  solve->add_flag("--json", sargs.json, "machine-readable report on stdout");

  GenArgs gargs;
  auto* gen = app.add_subcommand("gen", "generate a market split instance");
  gen->add_option("--m", gargs.m, "number of equations (>= 2); n = 10(m-1)")->required();
  gen->add_option("-D,--D,--d", gargs.D, "entries drawn uniformly from {0,...,D-1}")->required();
  gen->add_option("--seed", gargs.seed, "splitmix64 seed")->default_val(0);
  gen->add_flag("--plant", gargs.plant, "plant a random solution with floor(n/2) ones");
  gen->add_option("--out", gargs.out, "output path, - for stdout")->default_val("-");
  gen->add_option("--solution-out", gargs.solution_out, "write the planted solution to this file");

  BenchArgs bargs;
  auto* bench = app.add_subcommand("bench", "generate classes and tabulate timings");
  bench->add_option("--class", bargs.classes, "class as m,D (repeatable)");
  bench->add_option("--count", bargs.count, "instances per class")->default_val(4);
  bench->add_option("--seed", bargs.seed, "base seed; instance k uses seed+k")->default_val(1);
  bench->add_flag("--plant", bargs.plant, "plant solutions when generating");
  bench->add_flag("--first-only", bargs.first_only, "skip the all-solutions runs");
  bench->add_flag("--check-oracle", bargs.check_oracle, "cross-check counts with the oracle (n <= 44)");
  bench->add_option("--time-limit", bargs.time_limit, "per-run wall-clock limit in seconds");
  bench->add_option("--csv", bargs.csv, "write per-instance rows to a CSV file");

  std::string vinst, vsols;
  auto* verify = app.add_subcommand("verify", "check a file of candidate solutions");
  verify->add_option("instance", vinst, "CD-format instance file")->required();
  verify->add_option("solutions", vsols, "one candidate vector per line")->required();

  std::string opath;
  bool ocount = false, ocompare = false;
  auto* oracle = app.add_subcommand("oracle", "meet-in-the-middle reference enumeration");
  oracle->add_option("instance", opath, "CD-format instance file")->required();
  oracle->add_flag("--count-only", ocount, "print only the solution count");
  oracle->add_flag("--compare", ocompare, "also run the lattice solver and compare the sets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInputError;
  }

  try {
    if (*solve) return cmd_solve(sargs);
    if (*gen) return cmd_gen(gargs);
    if (*bench) return cmd_bench(bargs);
    if (*verify) return cmd_verify(vinst, vsols);
    if (*oracle) return cmd_oracle(opath, ocount, ocompare);
  } catch (const msplit::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}
