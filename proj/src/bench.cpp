#include "dpbalm/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <thread>

#include "dpbalm/diagnostics.hpp"
#include "dpbalm/solvers.hpp"

namespace dpbalm {

bool is_known_algorithm(const std::string& name) {
  return name == "dp-balm" || name == "balm" || name == "lalm" || name == "pda";
}

SolverConfig algorithm_config(const std::string& algo, const SolverConfig& base,
                              double rho, bool beta_overridden) {
  SolverConfig cfg = base;
  if (algo == "lalm") {
    if (!beta_overridden) cfg.beta = 0.01;
    if (cfg.r == 0.0) cfg.r = cfg.beta * rho + 0.001;
  } else if (algo == "pda") {
    if (cfg.r == 0.0) cfg.r = std::sqrt(rho + 0.001);
    if (cfg.s == 0.0) cfg.s = std::sqrt(rho + 0.001);
  }
  return cfg;
}

SolveReport run_algorithm(const std::string& algo, const Problem& problem,
                          const SolverConfig& cfg) {
  const Iterate w0 = zero_iterate(problem);
  if (algo == "dp-balm") return solve_dp_balm(problem, cfg, w0);
  if (algo == "balm") return solve_balm(problem, cfg, w0);
  if (algo == "lalm") return solve_lalm(problem, cfg, w0);
  if (algo == "pda") return solve_pda(problem, cfg, w0);
  throw std::invalid_argument("unknown algorithm: " + algo);
}

std::vector<BenchRow> run_benchmark(const BenchPlan& plan) {
  if (plan.sizes.empty() || plan.seeds.empty() || plan.algorithms.empty())
    throw std::invalid_argument("benchmark plan: sizes, seeds and algorithms "
                                "must be non-empty");
  for (const auto& a : plan.algorithms)
    if (!is_known_algorithm(a))
      throw std::invalid_argument("unknown algorithm: " + a);

  struct Cell {
    int n;
    uint64_t seed;
  };
  std::vector<Cell> cells;
  for (int n : plan.sizes)
    for (uint64_t seed : plan.seeds) cells.push_back({n, seed});

  const int algo_count = static_cast<int>(plan.algorithms.size());
  std::vector<BenchRow> rows(cells.size() * algo_count);

  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const size_t c = next.fetch_add(1);
      if (c >= cells.size()) return;
      const Cell& cell = cells[c];
      Problem problem;
      double rho = 0.0;
      std::string gen_error;
      try {
        problem = generate_basis_pursuit({cell.n, 0, 0, cell.seed});
        rho = spectral_radius_gram(problem.A).value;
      } catch (const std::exception& e) {
        gen_error = e.what();
      }
      for (int a = 0; a < algo_count; ++a) {
        BenchRow& row = rows[c * algo_count + a];
        row.n = cell.n;
        row.seed = cell.seed;
        row.algorithm = plan.algorithms[a];
        row.rho = rho;
        if (!gen_error.empty()) {
          row.status = "error: " + gen_error;
          continue;
        }
        try {
          const SolverConfig cfg = algorithm_config(
              row.algorithm, plan.base, rho, plan.beta_overridden);
          const SolveReport report = run_algorithm(row.algorithm, problem, cfg);
          row.iters = report.iterations;
          row.time_s = report.wall_time_s;
          row.status = to_string(report.status);
          if (report.status != SolveStatus::InvalidConfig) {
            const HistoryRecord& last = report.history.back();
            row.final_rel_err = last.rel_err.value_or(0.0);
            row.final_fp_res = last.fp_res_h;
          } else {
            row.status += ": " + report.message;
          }
        } catch (const std::exception& e) {
          row.status = std::string("error: ") + e.what();
        }
      }
    }
  };

  const int jobs = std::max(1, plan.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return rows;
}

namespace {

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t k = v.size();
  return k % 2 ? v[k / 2] : 0.5 * (v[k / 2 - 1] + v[k / 2]);
}

}  // namespace

std::vector<MedianRow> median_rows(const std::vector<BenchRow>& rows) {
  std::map<std::pair<int, std::string>, std::vector<const BenchRow*>> groups;
  for (const auto& row : rows)
    groups[{row.n, row.algorithm}].push_back(&row);
  std::vector<MedianRow> out;
  for (const auto& [key, group] : groups) {
    std::vector<double> iters, times;
    for (const BenchRow* r : group) {
      iters.push_back(static_cast<double>(r->iters));
      times.push_back(r->time_s);
    }
    out.push_back({key.first, key.second, median_of(iters), median_of(times)});
  }
  return out;
}

void write_history_csv(const SolveReport& report, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << std::setprecision(17);
  os << "iter,rel_err,primal_res,fp_res_h,elapsed_s\n";
  for (const auto& rec : report.history) {
    os << rec.iter << ',';
    if (rec.rel_err) os << *rec.rel_err;
    os << ',' << rec.primal_res << ',' << rec.fp_res_h << ',' << rec.elapsed_s
       << '\n';
  }
  if (!os) throw std::runtime_error("write failed: " + path);
}

void write_summary_csv(const std::vector<BenchRow>& rows,
                       const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << std::setprecision(17);
  os << "n,seed,algorithm,rho_AtA,iters,time_s,status\n";
  for (const auto& r : rows)
    os << r.n << ',' << r.seed << ',' << r.algorithm << ',' << r.rho << ','
       << r.iters << ',' << r.time_s << ',' << r.status << '\n';
  if (!os) throw std::runtime_error("write failed: " + path);
}

void write_median_csv(const std::vector<MedianRow>& rows,
                      const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << std::setprecision(17);
  os << "n,algorithm,median_iters,median_time_s\n";
  for (const auto& r : rows)
    os << r.n << ',' << r.algorithm << ',' << r.median_iters << ','
       << r.median_time_s << '\n';
  if (!os) throw std::runtime_error("write failed: " + path);
}

namespace {

Iterate random_iterate_like(const MultiBlockProblem& mp, Rng& rng) {
  Iterate w;
  for (const auto& blk : mp.blocks) w.x.push_back(gauss_sample(rng, blk.A.cols));
  w.lambda = gauss_sample(rng, mp.m());
  return w;
}

double skew_identity_worst(const MultiBlockProblem& mp, int pairs, Rng& rng) {
  double worst = 0.0;
  for (int k = 0; k < pairs; ++k) {
    const Iterate u = random_iterate_like(mp, rng);
    const Iterate v = random_iterate_like(mp, rng);
    const Iterate d = iterate_sub(u, v);
    const Iterate df = iterate_sub(vi_operator(mp, u), vi_operator(mp, v));
    double dot = vdot(d.lambda, df.lambda);
    for (size_t i = 0; i < d.x.size(); ++i) dot += vdot(d.x[i], df.x[i]);
    const double scale = iterate_norm(u) + iterate_norm(v);
    worst = std::max(worst, std::abs(dot) / (scale * scale + 1e-300));
  }
  return worst;
}

// Random small H configurations: Cholesky must pass and the implicit
// quadratic form must match the assembled one.
double pd_witness_worst(int configs, Rng& rng, std::vector<std::string>& notes) {
  double worst = 0.0;
  for (int c = 0; c < configs; ++c) {
    const int p = 1 + static_cast<int>(rng.next_u64() % 3);
    const int m = 2 + static_cast<int>(rng.next_u64() % 6);
    HMetric metric;
    metric.delta = std::pow(10.0, -6.0 + 7.0 * rng.next_uniform());
    int total = m;
    for (int i = 0; i < p; ++i) {
      int ni = 2 + static_cast<int>(rng.next_u64() % 8);
      ni = std::min(ni, 60 - total);
      if (ni < 1) ni = 1;
      total += ni;
      Mat A(m, ni);
      for (double& v : A.data) v = rng.next_normal();
      metric.A_blocks.push_back(std::move(A));
      metric.betas.push_back(std::pow(10.0, -3.0 + 6.0 * rng.next_uniform()));
    }
    Mat H;
    try {
      H = assemble_h(metric);
      cholesky(H);
    } catch (const std::exception& e) {
      notes.push_back(std::string("H positive-definiteness failed: ") +
                      e.what());
      return 1.0;
    }
    Iterate w;
    for (const auto& A : metric.A_blocks) w.x.push_back(gauss_sample(rng, A.cols));
    w.lambda = gauss_sample(rng, m);
    Vec flat;
    for (const auto& xi : w.x) flat.insert(flat.end(), xi.begin(), xi.end());
    flat.insert(flat.end(), w.lambda.begin(), w.lambda.end());
    const double explicit_q = vdot(flat, matvec(H, flat));
    const double implicit_q = metric.quad(w);
    worst = std::max(worst, std::abs(explicit_q - implicit_q) /
                                (1.0 + std::abs(explicit_q)));
  }
  return worst;
}

MultiBlockProblem random_two_block(int m, int n1, int n2, Sense sense,
                                  Rng& rng) {
  MultiBlockProblem mp;
  Mat A1(m, n1), A2(m, n2);
  for (double& v : A1.data) v = rng.next_normal();
  for (double& v : A2.data) v = rng.next_normal();
  mp.blocks.push_back({make_l1_prox(), std::move(A1),
                       0.5 + 4.0 * rng.next_uniform()});
  mp.blocks.push_back({make_quadratic_prox(Mat::identity(n2), Vec(n2, 0.0)),
                       std::move(A2), 0.5 + 4.0 * rng.next_uniform()});
  mp.b = gauss_sample(rng, m);
  mp.sense = sense;
  return mp;
}

}  // namespace

CertifyReport run_certification(const CertifyOptions& opts) {
  CertifyReport out;
  if (opts.sizes.empty() || opts.seeds.empty())
    throw std::invalid_argument("certify: sizes and seeds must be non-empty");

  SolverConfig cfg;  // beta=10, delta=1e-3, alpha=1 defaults
  Rng aux_rng(0x5eedULL);

  out.worst_pd_identity_rel_err = pd_witness_worst(50, aux_rng, out.notes);

  bool margin_first = true, mb_first = true;
  for (int n : opts.sizes) {
    for (uint64_t seed : opts.seeds) {
      const Problem problem = generate_basis_pursuit({n, 0, 0, seed});
      const MultiBlockProblem mp = as_multiblock(problem, cfg.beta);
      const HMetric h = h_metric(problem, cfg.beta, cfg.delta);

      out.worst_skew =
          std::max(out.worst_skew, skew_identity_worst(mp, 1000, aux_rng));

      // Prediction-inequality sampling along a real solve path.
      {
        SolverConfig run_cfg = cfg;
        run_cfg.record_iterates = true;
        run_cfg.max_iter = 100000;
        const SolveReport report =
            solve_dp_balm(problem, run_cfg, zero_iterate(problem));
        const int steps = std::min<int>(opts.margin_steps,
                                        static_cast<int>(report.trajectory.size()));
        for (int k = 0; k < steps; ++k) {
          const auto& [w_k, wbar] = report.trajectory[k];
          const MarginReport mr = check_prediction_inequality(
              mp, w_k, {w_k, wbar}, h, opts.margin_samples, aux_rng);
          if (margin_first || mr.min_margin < out.worst_margin)
            out.worst_margin = mr.min_margin;
          margin_first = false;
        }
      }

      // Contraction against a certified saddle point.
      try {
        const Iterate w_star = reference_saddle(problem, cfg);
        SolverConfig run_cfg = cfg;
        run_cfg.record_iterates = true;
        if (opts.corrupt_alpha) run_cfg.max_iter = 200;
        const SolveReport report =
            opts.corrupt_alpha
                ? detail::solve_dp_balm_corrupted(problem, run_cfg,
                                                  zero_iterate(problem),
                                                  *opts.corrupt_alpha)
                : solve_dp_balm(problem, run_cfg, zero_iterate(problem));
        const ContractionReport cr =
            check_contraction(report.trajectory, w_star, h, cfg.alpha);
        const double d0 = h.dist_sq(report.trajectory.front().first, w_star);
        const double normalized = cr.worst_violation / (1.0 + d0);
        out.worst_contraction_violation =
            std::max(out.worst_contraction_violation, normalized);
        ++out.contraction_checks;
      } catch (const NonConvergedError& e) {
        ++out.skipped;
        out.notes.push_back(std::string("contraction check skipped: ") +
                            e.what());
      }
    }
  }

  // Prediction-inequality margins on small random two-block instances,
  // both constraint senses.
  for (int trial = 0; trial < 4; ++trial) {
    const Sense sense = trial % 2 ? Sense::Inequality : Sense::Equality;
    const MultiBlockProblem mp = random_two_block(4, 6, 5, sense, aux_rng);
    const MetricMp metric = build_metric(mp, cfg.delta);
    const HMetric h = h_metric(mp, cfg.delta);
    Iterate w = zero_iterate(mp);
    for (int k = 0; k < 10; ++k) {
      const PredictionPair pair =
          multiblock_predict(mp, w, metric, cfg.inner_tol, cfg.inner_max_iter);
      const MarginReport mr = check_prediction_inequality(
          mp, w, pair, h, opts.margin_samples, aux_rng);
      if (mb_first || mr.min_margin < out.worst_margin_multiblock)
        out.worst_margin_multiblock = mr.min_margin;
      mb_first = false;
      w = correct(pair, cfg.alpha);
    }
  }

  out.passed = out.contraction_checks >= 1 &&
               out.worst_contraction_violation <= 1e-7 &&
               out.worst_margin >= -1e-8 &&
               out.worst_margin_multiblock >= -1e-8 &&
               out.worst_skew <= 1e-12 &&
               out.worst_pd_identity_rel_err <= 1e-9;
  return out;
}

}  // namespace dpbalm
