#pragma once

#include <string>
#include <vector>

#include "dpbalm/instances.hpp"
#include "dpbalm/model.hpp"

namespace dpbalm {

// Algorithm names accepted everywhere: dp-balm, balm, lalm, pda.
bool is_known_algorithm(const std::string& name);

// Fills in the per-algorithm defaults that depend on rho(A^T A):
//   lalm: beta = 0.01, r = beta * rho + 0.001
//   pda:  r = s = sqrt(rho + 0.001)
// Fields already set by the caller (non-zero r/s, overridden beta) win.
SolverConfig algorithm_config(const std::string& algo, const SolverConfig& base,
                              double rho, bool beta_overridden);

SolveReport run_algorithm(const std::string& algo, const Problem& problem,
                          const SolverConfig& cfg);

struct BenchPlan {
  std::vector<int> sizes;
  std::vector<uint64_t> seeds;
  std::vector<std::string> algorithms;
  SolverConfig base;  // tol, max_iter, stop rule, dp-balm/balm parameters
  bool beta_overridden = false;
  int jobs = 1;
};

struct BenchRow {
  int n = 0;
  uint64_t seed = 0;
  std::string algorithm;
  double rho = 0.0;
  int iters = 0;
  double time_s = 0.0;
  std::string status;
  double final_rel_err = 0.0;
  double final_fp_res = 0.0;
};

// One row per (n, seed, algorithm); failures are recorded in the status
// column and do not abort the run.
std::vector<BenchRow> run_benchmark(const BenchPlan& plan);

struct MedianRow {
  int n = 0;
  std::string algorithm;
  double median_iters = 0.0;
  double median_time_s = 0.0;
};

std::vector<MedianRow> median_rows(const std::vector<BenchRow>& rows);

void write_history_csv(const SolveReport& report, const std::string& path);
void write_summary_csv(const std::vector<BenchRow>& rows,
                       const std::string& path);
void write_median_csv(const std::vector<MedianRow>& rows,
                      const std::string& path);

struct CertifyOptions {
  std::vector<int> sizes;
  std::vector<uint64_t> seeds;
  int margin_samples = 100;
  int margin_steps = 20;
  // Fault injection: when set, the contraction run corrects with this alpha
  // while the check still assumes the configured one.
  std::optional<double> corrupt_alpha;
};

struct CertifyReport {
  bool passed = false;
  int contraction_checks = 0;
  double worst_contraction_violation = 0.0;
  double worst_margin = 0.0;
  double worst_margin_multiblock = 0.0;
  double worst_skew = 0.0;
  double worst_pd_identity_rel_err = 0.0;
  int skipped = 0;
  std::vector<std::string> notes;
};

CertifyReport run_certification(const CertifyOptions& opts);

}  // namespace dpbalm
