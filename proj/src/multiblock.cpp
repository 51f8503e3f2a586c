#include "dpbalm/multiblock.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "dpbalm/diagnostics.hpp"

namespace dpbalm {

MetricMp build_metric(const MultiBlockProblem& problem, double delta) {
  problem.validate();
  if (!(delta > 0.0))
    throw std::invalid_argument("build_metric: delta must be positive");
  const int m = problem.m();
  Mat M(m, m);
  for (const auto& blk : problem.blocks)
    add_scaled_gram_outer(M, blk.A, 1.0 / blk.beta);
  for (int i = 0; i < m; ++i) M(i, i) += delta;
  const double top = spectral_radius_sym(M).value;
  return MetricMp{cholesky(M), top};
}

DualResult dual_subproblem(const MetricMp& metric, const Vec& lambda_k,
                           const Vec& g, Sense sense, double inner_tol,
                           int inner_max_iter) {
  if (lambda_k.size() != g.size())
    throw std::invalid_argument("dual_subproblem: dimension mismatch");
  if (!(inner_tol > 0.0))
    throw std::invalid_argument("dual_subproblem: inner_tol must be positive");

  Vec unconstrained = vsub(lambda_k, metric.chol.solve(g));
  if (sense == Sense::Equality) return {std::move(unconstrained), true, 0};

  // Projected gradient on lambda >= 0 with fixed step 1/top_eig.
  Vec lam = unconstrained;
  for (double& v : lam) v = std::max(v, 0.0);
  const double step = 1.0 / metric.top_eig;
  const double res_tol = inner_tol * (1.0 + vnorm(g));
  for (int it = 0; it < inner_max_iter; ++it) {
    Vec grad = metric.chol.apply(vsub(lam, lambda_k));
    axpy(1.0, g, grad);
    double res = 0.0;
    for (size_t i = 0; i < lam.size(); ++i) {
      const double d = lam[i] - std::max(lam[i] - grad[i], 0.0);
      res += d * d;
    }
    if (std::sqrt(res) <= res_tol) return {std::move(lam), true, it};
    for (size_t i = 0; i < lam.size(); ++i)
      lam[i] = std::max(lam[i] - step * grad[i], 0.0);
  }
  return {std::move(lam), false, inner_max_iter};
}

namespace {

Vec constraint_residual(const MultiBlockProblem& problem,
                        const std::vector<Vec>& x) {
  Vec g = vscale(-1.0, problem.b);
  for (int i = 0; i < problem.p(); ++i)
    axpy(1.0, matvec(problem.blocks[i].A, x[i]), g);
  return g;
}

double primal_residual_norm(const MultiBlockProblem& problem, const Vec& g) {
  if (problem.sense == Sense::Equality) return vnorm(g);
  double s = 0.0;
  for (double v : g) {
    const double d = std::min(v, 0.0);
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace

PredictionPair multiblock_predict(const MultiBlockProblem& problem,
                                  const Iterate& w, const MetricMp& metric,
                                  double inner_tol, int inner_max_iter,
                                  int* inner_warnings) {
  if (static_cast<int>(w.x.size()) != problem.p() ||
      static_cast<int>(w.lambda.size()) != problem.m())
    throw std::invalid_argument("multiblock_predict: shape mismatch");

  const Vec g = constraint_residual(problem, w.x);
  DualResult dual = dual_subproblem(metric, w.lambda, g, problem.sense,
                                    inner_tol, inner_max_iter);
  if (!dual.converged && inner_warnings) ++*inner_warnings;

  // Extrapolated multiplier 2*lambda_bar - lambda drives every block.
  Vec t(dual.lambda.size());
  for (size_t i = 0; i < t.size(); ++i)
    t[i] = 2.0 * dual.lambda[i] - w.lambda[i];

  Iterate predictor;
  predictor.lambda = std::move(dual.lambda);
  for (int i = 0; i < problem.p(); ++i) {
    const auto& blk = problem.blocks[i];
    Vec p = w.x[i];
    axpy(1.0 / blk.beta, matTvec(blk.A, t), p);
    predictor.x.push_back(blk.prox->prox(p, blk.beta));
  }
  return {w, predictor};
}


namespace {

// Correction without the (0, 2) range check; fault-injection path only.
Iterate correct_unchecked(const PredictionPair& pair, double alpha) {
  if (alpha == 1.0) return pair.predictor;
  Iterate next;
  for (size_t i = 0; i < pair.current.x.size(); ++i) {
    Vec xi(pair.current.x[i].size());
    for (size_t j = 0; j < xi.size(); ++j)
      xi[j] = pair.current.x[i][j] -
              alpha * (pair.current.x[i][j] - pair.predictor.x[i][j]);
    next.x.push_back(std::move(xi));
  }
  next.lambda.resize(pair.current.lambda.size());
  for (size_t j = 0; j < next.lambda.size(); ++j)
    next.lambda[j] = pair.current.lambda[j] -
                     alpha * (pair.current.lambda[j] - pair.predictor.lambda[j]);
  return next;
}

}  // namespace

Iterate correct(const PredictionPair& pair, double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0))
    throw std::invalid_argument("correct: alpha must lie in (0, 2)");
  return correct_unchecked(pair, alpha);
}

namespace detail {

SolveReport solve_dp_core(const MultiBlockProblem& problem,
                          const SolverConfig& cfg, const Iterate& w0,
                          const Vec* known_solution,
                          const double* correction_alpha) {
  SolveReport report;
  if (auto err = cfg.validation_error(); !err.empty()) {
    report.status = SolveStatus::InvalidConfig;
    report.message = err;
    return report;
  }
  if (cfg.stop_rule == StopRule::RelativeError && known_solution == nullptr) {
    report.status = SolveStatus::InvalidConfig;
    report.message =
        "RelativeError stopping needs a known solution; use "
        "FixedPointResidual instead";
    return report;
  }
  problem.validate();

  const MetricMp metric = build_metric(problem, cfg.delta);
  const HMetric h = h_metric(problem, cfg.delta);
  const double corr_alpha = correction_alpha ? *correction_alpha : cfg.alpha;
  const double x_star_norm =
      known_solution ? vnorm(*known_solution) : 0.0;

  Iterate w = w0;
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&t0] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  };

  for (int k = 0;; ++k) {
    PredictionPair pair = multiblock_predict(problem, w, metric, cfg.inner_tol,
                                             cfg.inner_max_iter,
                                             &report.inner_warnings);
    const double fp_res = std::sqrt(h.dist_sq(w, pair.predictor));
    const Vec g = constraint_residual(problem, w.x);

    HistoryRecord rec;
    rec.iter = k;
    rec.primal_res = primal_residual_norm(problem, g);
    rec.fp_res_h = fp_res;
    rec.elapsed_s = elapsed();
    if (known_solution && x_star_norm > 0.0)
      rec.rel_err = vnorm(vsub(w.x0(), *known_solution)) / x_star_norm;
    report.history.push_back(rec);
    if (cfg.record_iterates) report.trajectory.push_back({w, pair.predictor});

    const bool stop = cfg.stop_rule == StopRule::RelativeError
                          ? (rec.rel_err && *rec.rel_err < cfg.tol)
                          : fp_res <= cfg.tol;
    if (stop) {
      report.status = SolveStatus::Converged;
      report.iterations = k;
      break;
    }
    if (k == cfg.max_iter) {
      report.status = SolveStatus::IterationLimit;
      report.iterations = k;
      break;
    }
    w = correction_alpha ? correct_unchecked(pair, corr_alpha)
                         : correct(pair, corr_alpha);
  }

  report.final_iterate = std::move(w);
  report.wall_time_s = elapsed();
  return report;
}

}  // namespace detail

SolveReport solve_multiblock(const MultiBlockProblem& problem,
                             const SolverConfig& cfg, const Iterate& w0) {
  return detail::solve_dp_core(problem, cfg, w0, nullptr);
}

}  // namespace dpbalm
