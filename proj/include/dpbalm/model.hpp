#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dpbalm/linalg.hpp"

namespace dpbalm {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Joint oracle for a convex objective term and its domain: prox() minimizes
// theta(x) + (weight/2)||x - p||^2 over the domain, value() is theta(x)
// (+inf outside the domain).
class ProxOracle {
 public:
  virtual ~ProxOracle() = default;
  virtual Vec prox(const Vec& p, double weight) const = 0;
  virtual double value(const Vec& x) const = 0;
  virtual bool contains(const Vec& x) const = 0;
};

using ProxPtr = std::shared_ptr<const ProxOracle>;

// theta = ||.||_1 on R^n (soft thresholding).
ProxPtr make_l1_prox();
// theta = (1/2) x^T Q x + c^T x on R^n, Q symmetric PSD.
ProxPtr make_quadratic_prox(const Mat& Q, const Vec& c);
// theta = ||.||_1 restricted to x >= 0.
ProxPtr make_nonneg_l1_prox();
// theta = c^T x restricted to x >= 0.
ProxPtr make_linear_nonneg_prox(const Vec& c);

struct Problem {
  ProxPtr prox;
  Mat A;
  Vec b;
  std::optional<Vec> known_solution;

  int n() const { return A.cols; }
  int m() const { return A.rows; }
  // Throws std::invalid_argument on inconsistent dimensions or an
  // infeasible known_solution.
  void validate() const;
};

enum class Sense { Equality, Inequality };

struct MultiBlockProblem {
  struct Block {
    ProxPtr prox;
    Mat A;
    double beta;
  };
  std::vector<Block> blocks;
  Vec b;
  Sense sense = Sense::Equality;

  int p() const { return static_cast<int>(blocks.size()); }
  int m() const { return static_cast<int>(b.size()); }
  void validate() const;
};

// Single-block problem viewed as a one-block separable problem.
MultiBlockProblem as_multiblock(const Problem& problem, double beta);

// The pair w = (x, lambda); single-block iterates use one x block.
struct Iterate {
  std::vector<Vec> x;
  Vec lambda;

  const Vec& x0() const { return x.front(); }
  Vec& x0() { return x.front(); }
  bool same_shape(const Iterate& o) const;
};

Iterate zero_iterate(const Problem& problem);
Iterate zero_iterate(const MultiBlockProblem& problem);
Iterate iterate_sub(const Iterate& a, const Iterate& b);
double iterate_norm(const Iterate& a);

enum class StopRule { RelativeError, FixedPointResidual };

struct SolverConfig {
  double beta = 10.0;
  double delta = 1e-3;
  double alpha = 1.0;
  double r = 0.0;  // linearized-ALM proximal weight
  double s = 0.0;  // PDA dual step
  double tol = 1e-7;
  StopRule stop_rule = StopRule::RelativeError;
  int max_iter = 100000;
  double inner_tol = 1e-12;
  int inner_max_iter = 50000;
  uint64_t seed = 0;
  // The alpha-relaxed correction for the balanced ALM is an extension of
  // the published scheme; off by default.
  bool balm_relaxed = false;
  // Store (w^k, wbar^k) pairs in the report (contraction checks).
  bool record_iterates = false;

  // Empty string when valid; otherwise the reason.
  std::string validation_error() const;
};

enum class SolveStatus { Converged, IterationLimit, InvalidConfig };

struct HistoryRecord {
  int iter = 0;
  std::optional<double> rel_err;  // ReE, when known_solution is present
  double primal_res = 0.0;
  double fp_res_h = 0.0;
  double elapsed_s = 0.0;
};

struct SolveReport {
  SolveStatus status = SolveStatus::InvalidConfig;
  int iterations = 0;
  double wall_time_s = 0.0;
  std::vector<HistoryRecord> history;
  Iterate final_iterate;
  std::string message;
  bool fp_res_euclidean = false;   // LALM/PDA record plain displacement
  bool relaxed_correction = false;
  int inner_warnings = 0;          // dual subproblems hitting the inner cap
  std::vector<std::pair<Iterate, Iterate>> trajectory;  // (w^k, wbar^k)
};

const char* to_string(SolveStatus s);

}  // namespace dpbalm
