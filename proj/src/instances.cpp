#include "dpbalm/instances.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "dpbalm/diagnostics.hpp"
#include "dpbalm/solvers.hpp"

namespace dpbalm {

void BasisPursuitSpec::validate() const {
  if (n <= 0) throw std::invalid_argument("basis pursuit: n must be positive");
  const int em = effective_m(), es = effective_s();
  if (!(es > 0 && es <= n))
    throw std::invalid_argument("basis pursuit: need 0 < s <= n");
  if (!(em > 0 && em < n))
    throw std::invalid_argument("basis pursuit: need 0 < m < n");
}

Problem generate_basis_pursuit(const BasisPursuitSpec& spec) {
  spec.validate();
  const int n = spec.n, m = spec.effective_m(), s = spec.effective_s();
  Rng rng(spec.seed);

  // Support of x*: partial Fisher-Yates over 0..n-1.
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < s; ++i) {
    const int j = i + static_cast<int>(rng.next_u64() % (n - i));
    std::swap(idx[i], idx[j]);
  }

  Vec x_star(n, 0.0);
  for (int i = 0; i < s; ++i) x_star[idx[i]] = rng.next_normal();

  Mat A(m, n);
  for (double& v : A.data) v = rng.next_normal();

  Problem problem;
  problem.prox = make_l1_prox();
  problem.b = matvec(A, x_star);
  problem.A = std::move(A);
  problem.known_solution = std::move(x_star);
  return problem;
}

namespace {

struct OracleBest {
  bool found = false;
  double l1 = 0.0;
  std::vector<int> support;
  Vec x;
};

void consider_support(const Mat& A, const Vec& b, const std::vector<int>& S,
                      OracleBest& best) {
  const int m = A.rows;
  const int k = static_cast<int>(S.size());
  Mat As(m, k);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < k; ++j) As(i, j) = A(i, S[j]);

  Mat G(k, k);
  Vec rhs(k, 0.0);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      double t = 0.0;
      for (int r = 0; r < m; ++r) t += As(r, i) * As(r, j);
      G(i, j) = t;
    }
    for (int r = 0; r < m; ++r) rhs[i] += As(r, i) * b[r];
  }
  Vec z;
  try {
    z = cholesky(G).solve(rhs);
  } catch (const std::runtime_error&) {
    return;  // dependent columns
  }
  Vec res = b;
  for (int r = 0; r < m; ++r)
    for (int j = 0; j < k; ++j) res[r] -= As(r, j) * z[j];
  if (vnorm(res) > 1e-10 * (1.0 + vnorm(b))) return;

  double l1 = 0.0;
  for (double v : z) l1 += std::abs(v);
  const bool better =
      !best.found || l1 < best.l1 - 1e-12 ||
      (std::abs(l1 - best.l1) <= 1e-12 && S < best.support);
  if (!better) return;
  best.found = true;
  best.l1 = l1;
  best.support = S;
  best.x.assign(A.cols, 0.0);
  for (int j = 0; j < k; ++j) best.x[S[j]] = z[j];
}

void enumerate_supports(const Mat& A, const Vec& b, int start, int remaining,
                        std::vector<int>& S, OracleBest& best) {
  if (remaining == 0) {
    consider_support(A, b, S, best);
    return;
  }
  for (int j = start; j <= A.cols - remaining; ++j) {
    S.push_back(j);
    enumerate_supports(A, b, j + 1, remaining - 1, S, best);
    S.pop_back();
  }
}

}  // namespace

Vec tiny_bp_oracle(const Mat& A, const Vec& b) {
  if (A.cols > 12)
    throw std::invalid_argument("tiny_bp_oracle: capped at n <= 12");
  if (A.rows >= A.cols)
    throw std::invalid_argument("tiny_bp_oracle: needs m < n");
  if (static_cast<int>(b.size()) != A.rows)
    throw std::invalid_argument("tiny_bp_oracle: dimension mismatch");

  if (vnorm(b) <= 1e-12) return Vec(A.cols, 0.0);

  OracleBest best;
  std::vector<int> S;
  for (int k = 1; k <= A.rows; ++k)
    enumerate_supports(A, b, 0, k, S, best);
  if (!best.found)
    throw InfeasibleError("tiny_bp_oracle: no support solves Ax = b");
  return best.x;
}

Iterate reference_saddle(const Problem& problem, const SolverConfig& base,
                         double tol, int cap) {
  SolverConfig cfg = base;
  cfg.stop_rule = StopRule::FixedPointResidual;
  cfg.tol = tol;
  cfg.max_iter = cap;
  cfg.record_iterates = false;

  SolveReport report = solve_dp_balm(problem, cfg, zero_iterate(problem));
  if (report.status != SolveStatus::Converged)
    throw NonConvergedError("reference_saddle: solver did not reach tol " +
                            std::to_string(tol));

  // Certify: recompute the fixed-point residual at the returned point.
  const CholFactor F = factor_metric(problem.A, cfg.beta, cfg.delta);
  const PredictionPair pair =
      dp_balm_predict(problem, report.final_iterate, cfg, F);
  const HMetric h = h_metric(problem, cfg.beta, cfg.delta);
  const double res = std::sqrt(h.dist_sq(pair.current, pair.predictor));
  if (res > 10.0 * tol)
    throw NonConvergedError("reference_saddle: certification failed");
  return report.final_iterate;
}

namespace {

void write_row(std::ostream& os, const double* v, int count) {
  os << std::setprecision(17);
  for (int i = 0; i < count; ++i) {
    if (i) os << ' ';
    os << v[i];
  }
  os << '\n';
}

Vec read_row(std::istream& is, int count, const std::string& what) {
  std::string line;
  if (!std::getline(is, line))
    throw std::runtime_error("instance file: missing " + what);
  std::istringstream ls(line);
  Vec v(count);
  for (int i = 0; i < count; ++i)
    if (!(ls >> v[i]))
      throw std::runtime_error("instance file: short row in " + what);
  return v;
}

}  // namespace

void save_instance(const Problem& problem, const BasisPursuitSpec& spec,
                   const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << "bp " << spec.n << ' ' << spec.effective_m() << ' '
     << spec.effective_s() << ' ' << spec.seed << '\n';
  for (int i = 0; i < problem.m(); ++i)
    write_row(os, &problem.A.data[static_cast<size_t>(i) * problem.n()],
              problem.n());
  if (!problem.known_solution)
    throw std::invalid_argument("save_instance: missing known solution");
  write_row(os, problem.known_solution->data(), problem.n());
  write_row(os, problem.b.data(), problem.m());
  if (!os) throw std::runtime_error("write failed: " + path);
}

std::pair<Problem, BasisPursuitSpec> load_instance(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open: " + path);
  std::string magic;
  BasisPursuitSpec spec;
  is >> magic >> spec.n >> spec.m >> spec.s >> spec.seed;
  if (magic != "bp" || !is)
    throw std::runtime_error("instance file: bad header in " + path);
  is.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
  spec.validate();

  Problem problem;
  problem.A = Mat(spec.m, spec.n);
  for (int i = 0; i < spec.m; ++i) {
    Vec row = read_row(is, spec.n, "A");
    std::copy(row.begin(), row.end(),
              problem.A.data.begin() + static_cast<size_t>(i) * spec.n);
  }
  problem.known_solution = read_row(is, spec.n, "x*");
  problem.b = read_row(is, spec.m, "b");
  problem.prox = make_l1_prox();
  problem.validate();
  return {std::move(problem), spec};
}

}  // namespace dpbalm
