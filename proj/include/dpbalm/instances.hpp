#pragma once

#include <stdexcept>
#include <string>

#include "dpbalm/model.hpp"

namespace dpbalm {

struct BasisPursuitSpec {
  int n = 0;
  int m = 0;  // 0 -> n/2
  int s = 0;  // 0 -> n/10
  uint64_t seed = 0;

  int effective_m() const { return m > 0 ? m : n / 2; }
  int effective_s() const { return s > 0 ? s : n / 10; }
  void validate() const;
};

// Sparse ground truth with s standard-normal entries, Gaussian A, b = A x*.
// Deterministic in the seed; x* is attached as known_solution.
Problem generate_basis_pursuit(const BasisPursuitSpec& spec);

struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// l1-minimal solution of Ax = b by exhaustive support enumeration (n <= 12).
// Ties break toward the lexicographically smallest support.
Vec tiny_bp_oracle(const Mat& A, const Vec& b);

struct NonConvergedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical saddle point via a high-accuracy DP-BALM run; certified by
// recomputing the fixed-point residual.
Iterate reference_saddle(const Problem& problem, const SolverConfig& base,
                         double tol = 1e-13, int cap = 100000);

// Text format: header "bp n m s seed", then A row-major, then x*, then b,
// one vector per line at 17 significant digits.
void save_instance(const Problem& problem, const BasisPursuitSpec& spec,
                   const std::string& path);
std::pair<Problem, BasisPursuitSpec> load_instance(const std::string& path);

}  // namespace dpbalm
