#include "dpbalm/solvers.hpp"
#include <functional>

#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "dpbalm/diagnostics.hpp"

namespace dpbalm {

PredictionPair dp_balm_predict(const Problem& problem, const Iterate& w,
                               const SolverConfig& cfg, const CholFactor& F) {
  const MultiBlockProblem mp = as_multiblock(problem, cfg.beta);
  const MetricMp metric{F, 0.0};  // top_eig unused on the equality path
  return multiblock_predict(mp, w, metric, cfg.inner_tol, cfg.inner_max_iter);
}

PredictionPair balm_predict(const Problem& problem, const Iterate& w,
                            const SolverConfig& cfg, const CholFactor& F) {
  if (static_cast<int>(w.x0().size()) != problem.n() ||
      static_cast<int>(w.lambda.size()) != problem.m())
    throw std::invalid_argument("balm_predict: shape mismatch");

  Vec p = w.x0();
  axpy(1.0 / cfg.beta, matTvec(problem.A, w.lambda), p);
  Vec xbar = problem.prox->prox(p, cfg.beta);

  Vec ex(xbar.size());
  for (size_t i = 0; i < ex.size(); ++i) ex[i] = 2.0 * xbar[i] - w.x0()[i];
  Vec rhs = vsub(matvec(problem.A, ex), problem.b);
  Vec lbar = vsub(w.lambda, F.solve(rhs));

  return {w, Iterate{{std::move(xbar)}, std::move(lbar)}};
}

SolveReport solve_dp_balm(const Problem& problem, const SolverConfig& cfg,
                          const Iterate& w0) {
  problem.validate();
  const Vec* x_star =
      problem.known_solution ? &*problem.known_solution : nullptr;
  return detail::solve_dp_core(as_multiblock(problem, cfg.beta), cfg, w0,
                               x_star);
}

namespace detail {

SolveReport solve_dp_balm_corrupted(const Problem& problem,
                                    const SolverConfig& cfg, const Iterate& w0,
                                    double correction_alpha) {
  problem.validate();
  const Vec* x_star =
      problem.known_solution ? &*problem.known_solution : nullptr;
  return solve_dp_core(as_multiblock(problem, cfg.beta), cfg, w0, x_star,
                       &correction_alpha);
}

}  // namespace detail

namespace {

// Shared iteration loop for the schemes that are not driven by the
// dual-primal core: BALM (H-norm residual) and LALM/PDA (plain Euclidean
// displacement, no H exists for those schemes).
struct LoopHooks {
  // Produces the predictor / next iterate from the current one.
  std::function<Iterate(const Iterate&)> advance;
  const HMetric* h = nullptr;  // when set, fp residual is the H-norm
  double alpha = 1.0;          // correction applied after recording
};

SolveReport run_loop(const Problem& problem, const SolverConfig& cfg,
                     const Iterate& w0, const LoopHooks& hooks) {
  SolveReport report;
  if (cfg.stop_rule == StopRule::RelativeError && !problem.known_solution) {
    report.status = SolveStatus::InvalidConfig;
    report.message =
        "RelativeError stopping needs a known solution; use "
        "FixedPointResidual instead";
    return report;
  }
  const double x_star_norm =
      problem.known_solution ? vnorm(*problem.known_solution) : 0.0;

  Iterate w = w0;
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&t0] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  };

  for (int k = 0;; ++k) {
    Iterate wbar = hooks.advance(w);
    const Iterate diff = iterate_sub(w, wbar);
    const double fp_res =
        hooks.h ? std::sqrt(hooks.h->quad(diff)) : iterate_norm(diff);

    HistoryRecord rec;
    rec.iter = k;
    rec.primal_res = vnorm(vsub(matvec(problem.A, w.x0()), problem.b));
    rec.fp_res_h = fp_res;
    rec.elapsed_s = elapsed();
    if (problem.known_solution && x_star_norm > 0.0)
      rec.rel_err = vnorm(vsub(w.x0(), *problem.known_solution)) / x_star_norm;
    report.history.push_back(rec);
    if (cfg.record_iterates) report.trajectory.push_back({w, wbar});

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
    w = correct({std::move(w), std::move(wbar)}, hooks.alpha);
  }

  report.final_iterate = std::move(w);
  report.wall_time_s = elapsed();
  return report;
}

SolveReport invalid(std::string msg) {
  SolveReport report;
  report.status = SolveStatus::InvalidConfig;
  report.message = std::move(msg);
  return report;
}

}  // namespace

SolveReport solve_balm(const Problem& problem, const SolverConfig& cfg,
                       const Iterate& w0) {
  problem.validate();
  if (auto err = cfg.validation_error(); !err.empty()) return invalid(err);
  if (cfg.alpha != 1.0 && !cfg.balm_relaxed)
    return invalid(
        "the balanced ALM uses alpha = 1; set balm_relaxed to enable the "
        "relaxed correction");

  const CholFactor F = factor_metric(problem.A, cfg.beta, cfg.delta);
  const HMetric h = h_metric(problem, cfg.beta, cfg.delta);
  LoopHooks hooks;
  hooks.advance = [&](const Iterate& w) {
    return balm_predict(problem, w, cfg, F).predictor;
  };
  hooks.h = &h;
  hooks.alpha = cfg.alpha;
  SolveReport report = run_loop(problem, cfg, w0, hooks);
  report.relaxed_correction = cfg.alpha != 1.0;
  return report;
}

SolveReport solve_lalm(const Problem& problem, const SolverConfig& cfg,
                       const Iterate& w0) {
  problem.validate();
  if (auto err = cfg.validation_error(); !err.empty()) return invalid(err);
  if (!(cfg.r > 0.0)) return invalid("linearized ALM needs r > 0");

  const double rho = spectral_radius_gram(problem.A).value;
  // 1e-12 slack absorbs the power-iteration error in rho.
  if (cfg.r + 1e-12 <= cfg.beta * rho) {
    std::ostringstream os;
    os << "linearized ALM requires r > beta * rho(A^T A) = " << cfg.beta * rho
       << ", got r = " << cfg.r;
    return invalid(os.str());
  }

  LoopHooks hooks;
  hooks.advance = [&](const Iterate& w) {
    Vec inner = vsub(matvec(problem.A, w.x0()), problem.b);
    Vec t = w.lambda;
    axpy(-cfg.beta, inner, t);
    Vec p = w.x0();
    axpy(1.0 / cfg.r, matTvec(problem.A, t), p);
    Vec xn = problem.prox->prox(p, cfg.r);
    Vec ln = w.lambda;
    axpy(-cfg.beta, vsub(matvec(problem.A, xn), problem.b), ln);
    return Iterate{{std::move(xn)}, std::move(ln)};
  };
  SolveReport report = run_loop(problem, cfg, w0, hooks);
  report.fp_res_euclidean = true;
  return report;
}

SolveReport solve_pda(const Problem& problem, const SolverConfig& cfg,
                      const Iterate& w0) {
  problem.validate();
  if (auto err = cfg.validation_error(); !err.empty()) return invalid(err);
  if (!(cfg.r > 0.0 && cfg.s > 0.0)) return invalid("PDA needs r > 0 and s > 0");

  const double rho = spectral_radius_gram(problem.A).value;
  if (cfg.r * cfg.s + 1e-12 < rho) {
    std::ostringstream os;
    os << "PDA requires r * s >= rho(A^T A) = " << rho << ", got r * s = "
       << cfg.r * cfg.s;
    return invalid(os.str());
  }

  LoopHooks hooks;
  hooks.advance = [&](const Iterate& w) {
    Vec p = w.x0();
    axpy(1.0 / cfg.r, matTvec(problem.A, w.lambda), p);
    Vec xn = problem.prox->prox(p, cfg.r);
    Vec ex(xn.size());
    for (size_t i = 0; i < ex.size(); ++i) ex[i] = 2.0 * xn[i] - w.x0()[i];
    Vec ln = w.lambda;
    axpy(-1.0 / cfg.s, vsub(matvec(problem.A, ex), problem.b), ln);
    return Iterate{{std::move(xn)}, std::move(ln)};
  };
  SolveReport report = run_loop(problem, cfg, w0, hooks);
  report.fp_res_euclidean = true;
  return report;
}

}  // namespace dpbalm
