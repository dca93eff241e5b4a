// Command-line front end: solve instances, sweep benchmarks, cross-check
// against the brute-force oracle, and compare the outer schemes.
#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "sinkja/sinkja.hpp"

namespace fs = std::filesystem;
using namespace sinkja;

namespace {

struct SolverFlags {
  std::string method = "accumulation";
  double beta0 = 1.0;
  double eps = 1e-2;
  double eps_inner = -1.0;  // defaults to eps when unset
  int max_outer = 50;
  int max_cycles = 1000;
  bool no_gangster = false;
  unsigned threads = 1;
  std::uint64_t seed = 1;
  int n = 0;
  std::string out;
  bool allow_large = false;
  int verbose = 0;

  OuterConfig outer() const {
    OuterConfig cfg;
    cfg.method = parse_method(method);
    cfg.beta0 = beta0;
    cfg.eps_outer = eps;
    cfg.max_outer = max_outer;
    cfg.inner.eps_inner = eps_inner > 0 ? eps_inner : eps;
    cfg.inner.max_cycles = max_cycles;
    cfg.inner.threads = threads;
    return cfg;
  }
};

void add_solver_flags(CLI::App* cmd, SolverFlags& f) {
  cmd->add_option("--method", f.method,
                  "regularization|proximal|accumulation|accumulation-square");
  cmd->add_option("--beta0", f.beta0, "base inverse temperature");
  cmd->add_option("--eps", f.eps, "outer relative-energy tolerance");
  cmd->add_option("--eps-inner", f.eps_inner,
                  "inner residual tolerance (default: same as --eps)");
  cmd->add_option("--max-outer", f.max_outer, "cap on external iterations");
  cmd->add_option("--max-cycles", f.max_cycles, "cap on projection cycles per solve");
  cmd->add_flag("--no-gangster", f.no_gangster, "drop the structural-zero constraints");
  cmd->add_option("--threads", f.threads, "worker threads (0 = hardware)");
  cmd->add_option("--seed", f.seed, "seed for random instances");
  cmd->add_flag("--allow-large-n", f.allow_large,
                "override the dense n <= 48 working-set cap");
  cmd->add_flag("-v,--verbose", f.verbose, "print per-iteration trace");
}

// Accepts a path or a bare instance name resolved in the data directory.
std::optional<fs::path> resolve_instance(const std::string& arg) {
  if (fs::exists(arg) && !fs::is_directory(arg)) return fs::path(arg);
  fs::path candidate = data_dir() / (arg + ".dat");
  if (fs::exists(candidate)) return candidate;
  candidate = data_dir() / arg;
  if (fs::exists(candidate) && !fs::is_directory(candidate)) return candidate;
  return std::nullopt;
}

std::optional<QaplibSolution> sibling_solution(const fs::path& dat) {
  fs::path sln = dat;
  sln.replace_extension(".sln");
  if (!fs::exists(sln)) return std::nullopt;
  try {
    return load_sln_file(sln);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

void print_trace(const BoundsReport& rep) {
  std::printf("  %-5s %16s\n", "iter", "energy");
  for (std::size_t k = 0; k < rep.energies.size(); ++k)
    std::printf("  %-5zu %16.8g\n", k + 1, rep.energies[k]);
}

ResultRow row_from_report(const QapInstance& inst, const std::string& method,
                          const BoundsReport& rep,
                          const std::optional<QaplibSolution>& sln) {
  ResultRow row;
  row.instance = inst.name();
  row.n = inst.n();
  row.method = method;
  row.lower = rep.lower;
  row.upper = rep.upper;
  if (sln) {
    row.bk_lower = sln->value;
    row.bk_upper = sln->value;
  }
  row.gap = rep.normalized_gap;
  row.outer_iters = rep.outer_iterations;
  row.inner_cycles = rep.inner_cycles;
  row.wall_ms = rep.wall_ms;
  return row;
}

int cmd_solve(const std::string& instance_arg, SolverFlags& f) {
  QapInstance inst = QapInstance::koopmans_beckmann(1, {0}, {0});
  std::optional<QaplibSolution> sln;
  if (!instance_arg.empty()) {
    const auto path = resolve_instance(instance_arg);
    if (!path) {
      std::cerr << "error: cannot find instance '" << instance_arg << "'\n";
      return 1;
    }
    try {
      inst = load_dat_file(*path).to_instance();
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    }
    sln = sibling_solution(*path);
  } else if (f.n >= 1) {
    inst = random_kb_instance(f.n, f.seed);
  } else {
    std::cerr << "error: pass an instance path or --n for a random instance\n";
    return 1;
  }

  BoundsReport rep;
  try {
    rep = solve(inst, f.outer(), !f.no_gangster, f.allow_large);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  std::printf("instance    : %s (n=%d)\n", inst.name().c_str(), inst.n());
  std::printf("method      : %s (beta0=%g, eps=%g, eps-inner=%g)\n",
              f.method.c_str(), f.beta0, f.eps, f.eps_inner > 0 ? f.eps_inner : f.eps);
  std::printf("lower bound : %.10g\n", rep.lower);
  std::printf("upper bound : %.10g\n", rep.upper);
  std::printf("gap         : %.6g raw, %.6g normalized\n", rep.upper - rep.lower,
              rep.normalized_gap);
  if (sln)
    std::printf("best known  : %.10g (bundled solution file)\n", sln->value);
  std::printf("permutation :");
  for (int v : rep.perm.perm) std::printf(" %d", v + 1);
  std::printf("\n");
  std::printf("iterations  : %d external, %ld inner cycles, %.1f ms\n",
              rep.outer_iterations, rep.inner_cycles, rep.wall_ms);
  std::printf("converged   : %s\n", rep.converged ? "yes" : "no");
  if (f.verbose) print_trace(rep);

  if (!f.out.empty()) {
    try {
      write_csv({row_from_report(inst, f.method, rep, sln)}, fs::path(f.out));
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    }
  }
  return rep.converged ? 0 : 2;
}

int cmd_bench(const std::vector<std::string>& instances, SolverFlags& f) {
  std::vector<ResultRow> rows;
  for (const auto& arg : instances) {
    const auto path = resolve_instance(arg);
    ResultRow row;
    row.instance = arg;
    if (!path) {
      std::cerr << "bench: cannot find '" << arg << "', row left empty\n";
      rows.push_back(row);
      continue;
    }
    try {
      const auto inst = load_dat_file(*path).to_instance();
      const auto rep = solve(inst, f.outer(), !f.no_gangster, f.allow_large);
      rows.push_back(row_from_report(inst, f.method, rep, sibling_solution(*path)));
      if (f.verbose)
        std::fprintf(stderr, "bench: %s done in %.0f ms\n", inst.name().c_str(),
                     rep.wall_ms);
    } catch (const std::exception& e) {
      std::cerr << "bench: " << arg << " failed: " << e.what() << "\n";
      rows.push_back(row);
    }
  }
  if (f.out.empty()) {
    write_csv(rows, std::cout);
  } else {
    write_csv(rows, fs::path(f.out));
  }
  return 0;
}

int cmd_oracle_check(int seeds, bool tau0, SolverFlags& f) {
  if (f.n < 1 || f.n > 9) {
    std::cerr << "oracle limit exceeded: brute force needs 1 <= n <= 9\n";
    return 1;
  }
  int violations = 0;
  for (int s = 0; s < seeds; ++s) {
    const std::uint64_t seed = f.seed + static_cast<std::uint64_t>(s);
    const auto inst = tau0 ? random_linear_instance(f.n, seed)
                           : random_kb_instance(f.n, seed);
    auto mask = build_gangster_mask(f.n, !f.no_gangster);
    const auto cost = lift_cost(inst, mask);

    // Cheap climb for the rounding target, then one tightly converged solve
    // at the reached effective beta for a trustworthy lower bound.
    auto trace = solve_lp(cost, f.outer());
    JapProjectionConfig tight;
    tight.eps_inner = 1e-7;
    tight.max_cycles = 50000;
    tight.threads = f.threads;
    auto [polished, st] = solve_regularized(cost, f.beta0, trace.u0_final, tight);
    const double lower = energy(cost, polished);
    const double upper =
        qap_energy(inst, round_to_permutation(trace.solution.x));

    auto [opt_perm, opt] = brute_force(inst);
    const double tol = 1e-6 * cost.scale();
    const bool lower_ok = lower <= opt + tol;
    const bool upper_ok = opt <= upper + 1e-9;
    const bool gap_ok =
        !tau0 || std::abs(upper - lower) <= 1e-3 * std::max(1.0, std::abs(opt));
    if (!(lower_ok && upper_ok && gap_ok)) {
      ++violations;
      std::printf("seed %llu VIOLATION: lower=%.10g opt=%.10g upper=%.10g%s\n",
                  static_cast<unsigned long long>(seed), lower, opt, upper,
                  tau0 ? " (tau0 gap)" : "");
    } else if (f.verbose) {
      std::printf("seed %llu ok: lower=%.6g opt=%.6g upper=%.6g\n",
                  static_cast<unsigned long long>(seed), lower, opt, upper);
    }
  }
  std::printf("oracle-check: %d seeds at n=%d, %d violation(s)\n", seeds, f.n,
              violations);
  return violations == 0 ? 0 : 1;
}

int cmd_compare_methods(int kmax, SolverFlags& f) {
  if (f.n < 1 || f.n > 4) {
    std::cerr << "compare-methods: tight tolerances need n <= 4\n";
    return 1;
  }
  const auto inst = random_kb_instance(f.n, f.seed);
  auto mask = build_gangster_mask(f.n, !f.no_gangster);
  const auto cost = lift_cost(inst, mask);

  JapProjectionConfig inner;
  inner.eps_inner = f.eps_inner > 0 ? f.eps_inner : 1e-8;
  inner.max_cycles = std::max(f.max_cycles, 200000);
  inner.threads = f.threads;
  const auto u0 = LiftedPoint::ones(mask);

  auto distance = [](const LiftedPoint& a, const LiftedPoint& b) {
    double m = 0.0;
    for (std::size_t p = 0; p < a.x.logs().size(); ++p)
      m = std::max(m, std::abs(std::exp(a.x.logs()[p]) - std::exp(b.x.logs()[p])));
    for (std::size_t p = 0; p < a.y.logs().size(); ++p)
      m = std::max(m, std::abs(std::exp(a.y.logs()[p]) - std::exp(b.y.logs()[p])));
    return m;
  };

  OuterConfig run;
  run.beta0 = f.beta0;
  run.eps_outer = 0.0;  // force exact iteration counts
  run.inner = inner;

  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!f.out.empty()) {
    file.open(f.out);
    if (!file) {
      std::cerr << "error: cannot write " << f.out << "\n";
      return 1;
    }
    out = &file;
  }
  *out << "k,beta_proximal,dist_proximal,beta_accumulation,dist_accumulation,"
          "beta_square,dist_square,dist_square_vs_pow2\n";
  for (int k = 1; k <= kmax; ++k) {
    run.max_outer = k;
    run.method = OuterMethod::proximal;
    const auto prox = solve_proximal(cost, run).solution;
    run.method = OuterMethod::accumulation;
    const auto acc = solve_accumulation(cost, run).solution;
    run.method = OuterMethod::accumulation_square;
    const auto sq = solve_accumulation(cost, run).solution;

    const double beta_prox = static_cast<double>(k) * f.beta0;
    const double beta_acc = std::ldexp(f.beta0, k - 1);          // 2^(k-1) b0
    const double beta_sq = (std::ldexp(1.0, k) - 1.0) * f.beta0;  // (2^k-1) b0
    auto [vp, sp] = solve_regularized(cost, beta_prox, u0, inner);
    auto [va, sa] = solve_regularized(cost, beta_acc, u0, inner);
    auto [vs, ss] = solve_regularized(cost, beta_sq, u0, inner);
    char line[256];
    std::snprintf(line, sizeof(line), "%d,%g,%.3e,%g,%.3e,%g,%.3e,%.3e\n", k,
                  beta_prox, distance(prox, vp), beta_acc, distance(acc, va),
                  beta_sq, distance(sq, vs), distance(sq, va));
    *out << line;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Lower and upper bounds for quadratic assignment problems via "
      "alternating KL projections onto the lifted assignment polytope"};
  app.require_subcommand(1);

  SolverFlags sf, bf, of, cf;
  // oracle-check climbs cheaply and polishes the bound afterwards.
  of.eps = 1e-4;
  of.eps_inner = 1e-3;
  of.max_cycles = 3000;
  of.max_outer = 30;

  std::string solve_instance;
  std::vector<std::string> bench_instances;
  int oracle_seeds = 20;
  bool oracle_tau0 = false;
  int compare_k = 4;

  auto* solve_cmd = app.add_subcommand("solve", "solve one instance and report bounds");
  solve_cmd->add_option("instance", solve_instance,
                        ".dat path or bundled instance name");
  solve_cmd->add_option("--n", sf.n, "random-instance dimension (with --seed)");
  solve_cmd->add_option("--out", sf.out, "write a one-row CSV report");
  add_solver_flags(solve_cmd, sf);

  auto* bench_cmd = app.add_subcommand("bench", "sweep instances into a CSV report");
  bench_cmd->add_option("instances", bench_instances, ".dat paths or names")
      ->required();
  bench_cmd->add_option("--out", bf.out, "CSV destination (default stdout)");
  add_solver_flags(bench_cmd, bf);

  auto* oracle_cmd = app.add_subcommand(
      "oracle-check", "sandwich test lower <= brute force <= upper over seeds");
  oracle_cmd->add_option("--n", of.n, "instance dimension (<= 9)")->required();
  oracle_cmd->add_option("--seeds", oracle_seeds, "number of seeds");
  oracle_cmd->add_flag("--tau0", oracle_tau0, "pure linear instances (tau = 0)");
  add_solver_flags(oracle_cmd, of);

  auto* compare_cmd = app.add_subcommand(
      "compare-methods", "per-k distances between the outer schemes");
  compare_cmd->add_option("--n", cf.n, "instance dimension (<= 4)");
  compare_cmd->add_option("--k", compare_k, "external iterations to compare");
  compare_cmd->add_option("--out", cf.out, "CSV destination (default stdout)");
  cf.n = 2;
  add_solver_flags(compare_cmd, cf);

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve_cmd->parsed()) return cmd_solve(solve_instance, sf);
    if (bench_cmd->parsed()) return cmd_bench(bench_instances, bf);
    if (oracle_cmd->parsed()) return cmd_oracle_check(oracle_seeds, oracle_tau0, of);
    if (compare_cmd->parsed()) return cmd_compare_methods(compare_k, cf);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
