#pragma once

#include <vector>

#include "dpbalm/model.hpp"
#include "dpbalm/solvers_types.hpp"

namespace dpbalm {

// The positive-definite metric
//   H = [ diag(beta_i I)        -A_i^T          ]
//       [ -A_i            sum (1/beta_i) A_i A_i^T + delta I ]
// represented implicitly; quadratic forms are evaluated through the
// sum-of-squares identity
//   w^T H w = sum_i ||(1/sqrt(beta_i)) A_i^T lambda - sqrt(beta_i) x_i||^2
//             + delta ||lambda||^2.
struct HMetric {
  std::vector<double> betas;
  double delta = 0.0;
  std::vector<Mat> A_blocks;

  double quad(const Iterate& w) const;
  double dist_sq(const Iterate& u, const Iterate& v) const;
  Iterate apply(const Iterate& d) const;  // H * d
  int dim() const;
};

HMetric h_metric(const Problem& problem, double beta, double delta);
HMetric h_metric(const MultiBlockProblem& problem, double delta);

// Explicit H, for small cross-checks only (dim <= 60).
Mat assemble_h(const HMetric& metric);

// F(w) = (-A_i^T lambda, ..., sum A_i x_i - b), stored in Iterate shape.
Iterate vi_operator(const Problem& problem, const Iterate& w);
Iterate vi_operator(const MultiBlockProblem& problem, const Iterate& w);

double objective_value(const MultiBlockProblem& problem,
                       const std::vector<Vec>& x);
double lagrangian_value(const Problem& problem, const Iterate& w);
double lagrangian_value(const MultiBlockProblem& problem, const Iterate& w);

struct MarginReport {
  double min_margin = 0.0;
  int samples = 0;
};

// Samples random w in Omega and evaluates the prediction inequality
//   theta(x) - theta(xbar) + (w - wbar)^T F(wbar) >= (w - wbar)^T H (w^k - wbar);
// returns the smallest lhs - rhs seen.
MarginReport check_prediction_inequality(const MultiBlockProblem& problem,
                                         const Iterate& w_k,
                                         const PredictionPair& pair,
                                         const HMetric& metric, int samples,
                                         Rng& rng);
MarginReport check_prediction_inequality(const Problem& problem, double beta,
                                         const Iterate& w_k,
                                         const PredictionPair& pair,
                                         const HMetric& metric, int samples,
                                         Rng& rng);

struct ContractionReport {
  double worst_violation = 0.0;
  int steps = 0;
};

// Checks ||w^{k+1}-w*||_H^2 <= ||w^k-w*||_H^2 - alpha(2-alpha)||w^k-wbar^k||_H^2
// over a recorded trajectory of (w^k, wbar^k) pairs.
ContractionReport check_contraction(
    const std::vector<std::pair<Iterate, Iterate>>& trajectory,
    const Iterate& w_star, const HMetric& metric, double alpha);

}  // namespace dpbalm
