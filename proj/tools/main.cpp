#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dpbalm/bench.hpp"
#include "dpbalm/diagnostics.hpp"
#include "dpbalm/instances.hpp"
#include "dpbalm/solvers.hpp"

using namespace dpbalm;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIterationLimit = 3;

uint64_t fnv1a_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open: " + path);
  uint64_t h = 1469598103934665603ULL;
  char c;
  while (is.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

struct CommonOpts {
  double beta = 10.0;
  double delta = 1e-3;
  double alpha = 1.0;
  double r = 0.0;
  double s_step = 0.0;
  double tol = 1e-7;
  int max_iter = 100000;
  std::string stop_rule = "rel-err";
  int jobs = 1;
};

void add_solver_flags(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--beta", opts.beta, "penalty parameter");
  cmd->add_option("--delta", opts.delta, "metric regularization (> 0)");
  cmd->add_option("--alpha", opts.alpha, "correction relaxation in (0, 2)");
  cmd->add_option("--r", opts.r, "primal step parameter (lalm, pda)");
  cmd->add_option("--s-step", opts.s_step, "dual step parameter (pda)");
  cmd->add_option("--tol", opts.tol, "stopping tolerance");
  cmd->add_option("--max-iter", opts.max_iter, "iteration cap");
  cmd->add_option("--stop-rule", opts.stop_rule, "rel-err or fp-res")
      ->check(CLI::IsMember({"rel-err", "fp-res"}));
}

SolverConfig to_config(const CommonOpts& opts) {
  SolverConfig cfg;
  cfg.beta = opts.beta;
  cfg.delta = opts.delta;
  cfg.alpha = opts.alpha;
  cfg.r = opts.r;
  cfg.s = opts.s_step;
  cfg.tol = opts.tol;
  cfg.max_iter = opts.max_iter;
  cfg.stop_rule = opts.stop_rule == "fp-res" ? StopRule::FixedPointResidual
                                             : StopRule::RelativeError;
  return cfg;
}

std::string join_path(const std::string& dir, const std::string& name) {
  if (dir.empty() || dir == ".") return name;
  return dir.back() == '/' ? dir + name : dir + "/" + name;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dpbalm: balanced augmented Lagrangian solvers and benchmarks"};
  app.require_subcommand(1);
  app.set_config("--config", "", "flat key = value config file");
  app.allow_config_extras(CLI::config_extras_mode::error);

  // generate -----------------------------------------------------------------
  auto* gen = app.add_subcommand("generate", "write a basis-pursuit instance");
  int gen_n = 0, gen_m = 0, gen_s = 0;
  uint64_t gen_seed = 0;
  std::string gen_out = "instance.txt";
  gen->add_option("--n", gen_n, "primal dimension")->required();
  gen->add_option("--m", gen_m, "constraint rows (default n/2)");
  gen->add_option("--s", gen_s, "ground-truth sparsity (default n/10)");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--out", gen_out, "output path");

  // solve --------------------------------------------------------------------
  auto* solve = app.add_subcommand("solve", "run one solver on an instance");
  std::string solve_instance, solve_algo = "dp-balm", solve_out;
  CommonOpts solve_opts;
  solve->add_option("instance", solve_instance, "instance file")->required();
  solve->add_option("--algo", solve_algo, "dp-balm, balm, lalm or pda");
  solve->add_option("--out", solve_out, "history CSV path");
  add_solver_flags(solve, solve_opts);

  // bench --------------------------------------------------------------------
  auto* bench = app.add_subcommand("bench", "run the benchmark matrix");
  std::vector<int> bench_sizes{100};
  std::vector<uint64_t> bench_seeds{1};
  std::vector<std::string> bench_algos{"dp-balm", "balm", "pda", "lalm"};
  std::string bench_out = ".";
  CommonOpts bench_opts;
  bench->add_option("--sizes", bench_sizes, "problem sizes n");
  bench->add_option("--seeds", bench_seeds, "instance seeds");
  bench->add_option("--algos", bench_algos, "algorithms to run");
  bench->add_option("--out", bench_out, "output directory");
  bench->add_option("--jobs", bench_opts.jobs, "parallel benchmark cells");
  add_solver_flags(bench, bench_opts);

  // certify ------------------------------------------------------------------
  auto* certify = app.add_subcommand("certify", "run the invariant checks");
  std::vector<int> cert_sizes{50};
  std::vector<uint64_t> cert_seeds{1, 2, 3};
  CertifyOptions cert_opts;
  double corrupt_alpha = 0.0;
  certify->add_option("--sizes", cert_sizes, "instance sizes");
  certify->add_option("--seeds", cert_seeds, "instance seeds");
  certify->add_option("--samples", cert_opts.margin_samples,
                      "random points per margin check");
  certify->add_option("--steps", cert_opts.margin_steps,
                      "iterations sampled per instance");
  certify->add_option("--corrupt-alpha", corrupt_alpha)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed()) {
      const BasisPursuitSpec spec{gen_n, gen_m, gen_s, gen_seed};
      const Problem problem = generate_basis_pursuit(spec);
      save_instance(problem, spec, gen_out);
      std::printf("wrote %s  n=%d m=%d s=%d seed=%llu\n", gen_out.c_str(),
                  spec.n, spec.effective_m(), spec.effective_s(),
                  static_cast<unsigned long long>(spec.seed));
      std::printf("checksum fnv1a:%016llx\n",
                  static_cast<unsigned long long>(fnv1a_file(gen_out)));
      return kExitOk;
    }

    if (solve->parsed()) {
      if (!is_known_algorithm(solve_algo)) {
        std::fprintf(stderr, "unknown algorithm: %s\n", solve_algo.c_str());
        return kExitUsage;
      }
      const auto [problem, spec] = load_instance(solve_instance);
      const double rho = spectral_radius_gram(problem.A).value;
      const SolverConfig cfg =
          algorithm_config(solve_algo, to_config(solve_opts), rho,
                           solve->count("--beta") > 0);
      const SolveReport report = run_algorithm(solve_algo, problem, cfg);
      if (report.status == SolveStatus::InvalidConfig) {
        std::fprintf(stderr, "invalid configuration: %s\n",
                     report.message.c_str());
        return kExitUsage;
      }
      if (!solve_out.empty()) write_history_csv(report, solve_out);
      const HistoryRecord& last = report.history.back();
      std::ostringstream line;
      line.precision(17);
      line << solve_algo << ' ' << spec.n << ' ' << report.iterations << ' '
           << report.wall_time_s << ' ';
      if (last.rel_err)
        line << *last.rel_err;
      else
        line << '-';
      line << ' ' << last.fp_res_h;
      std::puts(line.str().c_str());
      return report.status == SolveStatus::Converged ? kExitOk
                                                     : kExitIterationLimit;
    }

    if (bench->parsed()) {
      BenchPlan plan;
      plan.sizes = bench_sizes;
      plan.seeds = bench_seeds;
      plan.algorithms = bench_algos;
      plan.base = to_config(bench_opts);
      plan.beta_overridden = bench->count("--beta") > 0;
      plan.jobs = bench_opts.jobs;
      const std::vector<BenchRow> rows = run_benchmark(plan);
      const std::string summary = join_path(bench_out, "summary.csv");
      const std::string median = join_path(bench_out, "median.csv");
      write_summary_csv(rows, summary);
      write_median_csv(median_rows(rows), median);
      int failed = 0;
      for (const auto& r : rows)
        if (r.status != "converged") ++failed;
      std::printf("wrote %s and %s (%zu rows, %d not converged)\n",
                  summary.c_str(), median.c_str(), rows.size(), failed);
      return kExitOk;
    }

    // certify
    cert_opts.sizes = cert_sizes;
    cert_opts.seeds = cert_seeds;
    if (certify->count("--corrupt-alpha") > 0)
      cert_opts.corrupt_alpha = corrupt_alpha;
    const CertifyReport report = run_certification(cert_opts);
    std::printf("contraction checks run: %d (skipped %d)\n",
                report.contraction_checks, report.skipped);
    std::printf("worst contraction violation (normalized): %.3e\n",
                report.worst_contraction_violation);
    std::printf("worst prediction-inequality margin: %.3e\n",
                report.worst_margin);
    std::printf("worst multi-block margin: %.3e\n",
                report.worst_margin_multiblock);
    std::printf("worst skew identity residual: %.3e\n", report.worst_skew);
    std::printf("worst H identity relative error: %.3e\n",
                report.worst_pd_identity_rel_err);
    for (const auto& note : report.notes)
      std::printf("note: %s\n", note.c_str());
    std::printf("certification %s\n", report.passed ? "passed" : "FAILED");
    return report.passed ? kExitOk : kExitCheckFailed;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitCheckFailed;
  }
}
