#pragma once

#include "dpbalm/model.hpp"
#include "dpbalm/solvers_types.hpp"

namespace dpbalm {

// Dual metric M_p = sum_i (1/beta_i) A_i A_i^T + delta I.
struct MetricMp {
  CholFactor chol;
  double top_eig = 0.0;  // largest eigenvalue, step size of the inner QP
};

MetricMp build_metric(const MultiBlockProblem& problem, double delta);

struct DualResult {
  Vec lambda;
  bool converged = true;
  int iterations = 0;
};

// Solves argmin over Lambda of (1/2)(l - lambda_k)^T M_p (l - lambda_k)
// + l^T g. Equality: exact via the Cholesky factor. Inequality: projected
// gradient on l >= 0 with fixed step 1/top_eig, warm-started at the
// projection of the unconstrained minimizer.
DualResult dual_subproblem(const MetricMp& metric, const Vec& lambda_k,
                           const Vec& g, Sense sense, double inner_tol,
                           int inner_max_iter);

PredictionPair multiblock_predict(const MultiBlockProblem& problem,
                                  const Iterate& w, const MetricMp& metric,
                                  double inner_tol, int inner_max_iter,
                                  int* inner_warnings = nullptr);

SolveReport solve_multiblock(const MultiBlockProblem& problem,
                             const SolverConfig& cfg, const Iterate& w0);

namespace detail {

// Shared dual-primal loop; known_solution (single-block only) enables the
// RelativeError stopping rule. correction_alpha overrides cfg.alpha in the
// correction step only (diagnostic fault injection).
SolveReport solve_dp_core(const MultiBlockProblem& problem,
                          const SolverConfig& cfg, const Iterate& w0,
                          const Vec* known_solution,
                          const double* correction_alpha = nullptr);

}  // namespace detail

}  // namespace dpbalm
