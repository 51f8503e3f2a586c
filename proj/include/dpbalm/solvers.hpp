#pragma once

#include "dpbalm/model.hpp"
#include "dpbalm/multiblock.hpp"
#include "dpbalm/solvers_types.hpp"

namespace dpbalm {

// Dual-primal prediction: lambda_bar first from the metric solve, then the
// proximal step driven by 2*lambda_bar - lambda.
PredictionPair dp_balm_predict(const Problem& problem, const Iterate& w,
                               const SolverConfig& cfg, const CholFactor& F);

// Balanced-ALM step in prediction form: proximal step from lambda^k first,
// then the metric solve on A(2*xbar - x) - b. The shared correction with
// alpha = 1 reproduces the original scheme.
PredictionPair balm_predict(const Problem& problem, const Iterate& w,
                            const SolverConfig& cfg, const CholFactor& F);

SolveReport solve_dp_balm(const Problem& problem, const SolverConfig& cfg,
                          const Iterate& w0);
SolveReport solve_balm(const Problem& problem, const SolverConfig& cfg,
                       const Iterate& w0);
SolveReport solve_lalm(const Problem& problem, const SolverConfig& cfg,
                       const Iterate& w0);
SolveReport solve_pda(const Problem& problem, const SolverConfig& cfg,
                      const Iterate& w0);

namespace detail {

// Fault-injection entry: runs DP-BALM but applies `correction_alpha` in the
// correction step while reporting against cfg.alpha. Diagnostics only.
SolveReport solve_dp_balm_corrupted(const Problem& problem,
                                    const SolverConfig& cfg, const Iterate& w0,
                                    double correction_alpha);

}  // namespace detail

}  // namespace dpbalm
