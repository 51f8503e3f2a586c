#include "dpbalm/model.hpp"

#include <cmath>
#include <stdexcept>

namespace dpbalm {

namespace {

void check_weight(double w) {
  if (!(w > 0.0)) throw std::invalid_argument("prox: weight must be positive");
}

class L1Prox final : public ProxOracle {
 public:
  Vec prox(const Vec& p, double weight) const override {
    check_weight(weight);
    const double t = 1.0 / weight;
    Vec out(p.size());
    for (size_t i = 0; i < p.size(); ++i) {
      const double a = std::abs(p[i]) - t;
      out[i] = a > 0.0 ? (p[i] > 0.0 ? a : -a) : 0.0;
    }
    return out;
  }
  double value(const Vec& x) const override {
    double s = 0.0;
    for (double v : x) s += std::abs(v);
    return s;
  }
  bool contains(const Vec&) const override { return true; }
};

class QuadraticProx final : public ProxOracle {
 public:
  QuadraticProx(Mat Q, Vec c) : Q_(std::move(Q)), c_(std::move(c)) {
    if (Q_.rows != Q_.cols || Q_.rows != static_cast<int>(c_.size()))
      throw std::invalid_argument("quadratic prox: dimension mismatch");
  }
  Vec prox(const Vec& p, double weight) const override {
    check_weight(weight);
    if (p.size() != c_.size())
      throw std::invalid_argument("quadratic prox: dimension mismatch");
    // (Q + wI) x = w p - c
    Mat S = Q_;
    for (int i = 0; i < S.rows; ++i) S(i, i) += weight;
    Vec rhs(p.size());
    for (size_t i = 0; i < p.size(); ++i) rhs[i] = weight * p[i] - c_[i];
    return cholesky(S).solve(rhs);
  }
  double value(const Vec& x) const override {
    return 0.5 * vdot(x, matvec(Q_, x)) + vdot(c_, x);
  }
  bool contains(const Vec&) const override { return true; }

 private:
  Mat Q_;
  Vec c_;
};

class NonnegL1Prox final : public ProxOracle {
 public:
  Vec prox(const Vec& p, double weight) const override {
    check_weight(weight);
    const double t = 1.0 / weight;
    Vec out(p.size());
    for (size_t i = 0; i < p.size(); ++i) out[i] = std::max(p[i] - t, 0.0);
    return out;
  }
  double value(const Vec& x) const override {
    double s = 0.0;
    for (double v : x) {
      if (v < 0.0) return kInf;
      s += v;
    }
    return s;
  }
  bool contains(const Vec& x) const override {
    for (double v : x)
      if (v < 0.0) return false;
    return true;
  }
};

class LinearNonnegProx final : public ProxOracle {
 public:
  explicit LinearNonnegProx(Vec c) : c_(std::move(c)) {}
  Vec prox(const Vec& p, double weight) const override {
    check_weight(weight);
    if (p.size() != c_.size())
      throw std::invalid_argument("linear prox: dimension mismatch");
    Vec out(p.size());
    for (size_t i = 0; i < p.size(); ++i)
      out[i] = std::max(p[i] - c_[i] / weight, 0.0);
    return out;
  }
  double value(const Vec& x) const override {
    for (double v : x)
      if (v < 0.0) return kInf;
    return vdot(c_, x);
  }
  bool contains(const Vec& x) const override {
    for (double v : x)
      if (v < 0.0) return false;
    return true;
  }

 private:
  Vec c_;
};

}  // namespace

ProxPtr make_l1_prox() { return std::make_shared<L1Prox>(); }

ProxPtr make_quadratic_prox(const Mat& Q, const Vec& c) {
  return std::make_shared<QuadraticProx>(Q, c);
}

ProxPtr make_nonneg_l1_prox() { return std::make_shared<NonnegL1Prox>(); }

ProxPtr make_linear_nonneg_prox(const Vec& c) {
  return std::make_shared<LinearNonnegProx>(c);
}

void Problem::validate() const {
  if (!prox) throw std::invalid_argument("Problem: missing prox oracle");
  if (static_cast<int>(b.size()) != A.rows)
    throw std::invalid_argument("Problem: rows(A) != dim(b)");
  if (!A.all_finite())
    throw std::invalid_argument("Problem: non-finite entries in A");
  if (known_solution) {
    if (static_cast<int>(known_solution->size()) != A.cols)
      throw std::invalid_argument("Problem: known_solution dimension mismatch");
    const double res = vnorm(vsub(matvec(A, *known_solution), b));
    if (res > 1e-10 * (1.0 + vnorm(b)))
      throw std::invalid_argument("Problem: known_solution is infeasible");
  }
}

void MultiBlockProblem::validate() const {
  if (blocks.empty()) throw std::invalid_argument("MultiBlockProblem: p < 1");
  for (const auto& blk : blocks) {
    if (!blk.prox)
      throw std::invalid_argument("MultiBlockProblem: missing prox oracle");
    if (blk.A.rows != m())
      throw std::invalid_argument("MultiBlockProblem: block row count != dim(b)");
    if (!(blk.beta > 0.0))
      throw std::invalid_argument("MultiBlockProblem: beta_i must be positive");
    if (!blk.A.all_finite())
      throw std::invalid_argument("MultiBlockProblem: non-finite entries");
  }
}

MultiBlockProblem as_multiblock(const Problem& problem, double beta) {
  MultiBlockProblem mp;
  mp.blocks.push_back({problem.prox, problem.A, beta});
  mp.b = problem.b;
  mp.sense = Sense::Equality;
  return mp;
}

bool Iterate::same_shape(const Iterate& o) const {
  if (x.size() != o.x.size() || lambda.size() != o.lambda.size()) return false;
  for (size_t i = 0; i < x.size(); ++i)
    if (x[i].size() != o.x[i].size()) return false;
  return true;
}

Iterate zero_iterate(const Problem& problem) {
  return Iterate{{Vec(problem.n(), 0.0)}, Vec(problem.m(), 0.0)};
}

Iterate zero_iterate(const MultiBlockProblem& problem) {
  Iterate w;
  for (const auto& blk : problem.blocks) w.x.emplace_back(blk.A.cols, 0.0);
  w.lambda.assign(problem.m(), 0.0);
  return w;
}

Iterate iterate_sub(const Iterate& a, const Iterate& b) {
  if (!a.same_shape(b))
    throw std::invalid_argument("iterate_sub: shape mismatch");
  Iterate d;
  d.x.reserve(a.x.size());
  for (size_t i = 0; i < a.x.size(); ++i) d.x.push_back(vsub(a.x[i], b.x[i]));
  d.lambda = vsub(a.lambda, b.lambda);
  return d;
}

double iterate_norm(const Iterate& a) {
  double s = vdot(a.lambda, a.lambda);
  for (const auto& xi : a.x) s += vdot(xi, xi);
  return std::sqrt(s);
}

std::string SolverConfig::validation_error() const {
  if (!(alpha > 0.0 && alpha < 2.0)) return "alpha must lie in (0, 2)";
  if (!(beta > 0.0)) return "beta must be positive";
  if (!(delta > 0.0)) return "delta must be positive";
  if (!(tol > 0.0)) return "tol must be positive";
  if (!(inner_tol > 0.0)) return "inner_tol must be positive";
  if (max_iter <= 0) return "max_iter must be positive";
  if (inner_max_iter <= 0) return "inner_max_iter must be positive";
  return {};
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::IterationLimit: return "iteration-limit";
    case SolveStatus::InvalidConfig: return "invalid-config";
  }
  return "unknown";
}

}  // namespace dpbalm
