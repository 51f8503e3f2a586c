#include "dpbalm/diagnostics.hpp"

#include <cmath>
#include <stdexcept>

namespace dpbalm {

int HMetric::dim() const {
  int d = A_blocks.empty() ? 0 : A_blocks.front().rows;
  for (const auto& A : A_blocks) d += A.cols;
  return d;
}

double HMetric::quad(const Iterate& w) const {
  if (w.x.size() != betas.size())
    throw std::invalid_argument("HMetric::quad: block count mismatch");
  double s = delta * vdot(w.lambda, w.lambda);
  for (size_t i = 0; i < betas.size(); ++i) {
    const double sb = std::sqrt(betas[i]);
    const double sib = std::sqrt(1.0 / betas[i]);
    Vec t = matTvec(A_blocks[i], w.lambda);
    for (size_t j = 0; j < t.size(); ++j) {
      const double v = sib * t[j] - sb * w.x[i][j];
      s += v * v;
    }
  }
  return s;
}

double HMetric::dist_sq(const Iterate& u, const Iterate& v) const {
  return quad(iterate_sub(u, v));
}

Iterate HMetric::apply(const Iterate& d) const {
  if (d.x.size() != betas.size())
    throw std::invalid_argument("HMetric::apply: block count mismatch");
  Iterate out;
  out.lambda = vscale(delta, d.lambda);
  for (size_t i = 0; i < betas.size(); ++i) {
    Vec at_l = matTvec(A_blocks[i], d.lambda);
    Vec xi = vscale(betas[i], d.x[i]);
    axpy(-1.0, at_l, xi);
    out.x.push_back(std::move(xi));
    axpy(-1.0, matvec(A_blocks[i], d.x[i]), out.lambda);
    axpy(1.0 / betas[i], matvec(A_blocks[i], at_l), out.lambda);
  }
  return out;
}

HMetric h_metric(const Problem& problem, double beta, double delta) {
  return HMetric{{beta}, delta, {problem.A}};
}

HMetric h_metric(const MultiBlockProblem& problem, double delta) {
  HMetric metric;
  metric.delta = delta;
  for (const auto& blk : problem.blocks) {
    metric.betas.push_back(blk.beta);
    metric.A_blocks.push_back(blk.A);
  }
  return metric;
}

Mat assemble_h(const HMetric& metric) {
  const int d = metric.dim();
  if (d > 60)
    throw std::invalid_argument("assemble_h: explicit H is capped at dim 60");
  const int m = metric.A_blocks.front().rows;
  const int nx = d - m;
  Mat H(d, d);
  int off = 0;
  for (size_t i = 0; i < metric.betas.size(); ++i) {
    const Mat& A = metric.A_blocks[i];
    for (int j = 0; j < A.cols; ++j) H(off + j, off + j) = metric.betas[i];
    for (int r = 0; r < m; ++r)
      for (int j = 0; j < A.cols; ++j) {
        H(nx + r, off + j) = -A(r, j);
        H(off + j, nx + r) = -A(r, j);
      }
    off += A.cols;
  }
  Mat M(m, m);
  for (size_t i = 0; i < metric.betas.size(); ++i)
    add_scaled_gram_outer(M, metric.A_blocks[i], 1.0 / metric.betas[i]);
  for (int r = 0; r < m; ++r) M(r, r) += metric.delta;
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c) H(nx + r, nx + c) = M(r, c);
  return H;
}

Iterate vi_operator(const Problem& problem, const Iterate& w) {
  Iterate f;
  f.x.push_back(vscale(-1.0, matTvec(problem.A, w.lambda)));
  f.lambda = vsub(matvec(problem.A, w.x0()), problem.b);
  return f;
}

Iterate vi_operator(const MultiBlockProblem& problem, const Iterate& w) {
  if (static_cast<int>(w.x.size()) != problem.p())
    throw std::invalid_argument("vi_operator: block count mismatch");
  Iterate f;
  f.lambda = vscale(-1.0, problem.b);
  for (int i = 0; i < problem.p(); ++i) {
    f.x.push_back(vscale(-1.0, matTvec(problem.blocks[i].A, w.lambda)));
    axpy(1.0, matvec(problem.blocks[i].A, w.x[i]), f.lambda);
  }
  return f;
}

double objective_value(const MultiBlockProblem& problem,
                       const std::vector<Vec>& x) {
  double s = 0.0;
  for (int i = 0; i < problem.p(); ++i) {
    const double v = problem.blocks[i].prox->value(x[i]);
    if (!std::isfinite(v)) return kInf;
    s += v;
  }
  return s;
}

double lagrangian_value(const Problem& problem, const Iterate& w) {
  const double theta = problem.prox->value(w.x0());
  if (!std::isfinite(theta)) return kInf;
  return theta - vdot(w.lambda, vsub(matvec(problem.A, w.x0()), problem.b));
}

double lagrangian_value(const MultiBlockProblem& problem, const Iterate& w) {
  const double theta = objective_value(problem, w.x);
  if (!std::isfinite(theta)) return kInf;
  Vec g = vscale(-1.0, problem.b);
  for (int i = 0; i < problem.p(); ++i)
    axpy(1.0, matvec(problem.blocks[i].A, w.x[i]), g);
  return theta - vdot(w.lambda, g);
}

namespace {

double iterate_dot(const Iterate& a, const Iterate& b) {
  double s = vdot(a.lambda, b.lambda);
  for (size_t i = 0; i < a.x.size(); ++i) s += vdot(a.x[i], b.x[i]);
  return s;
}

Iterate sample_omega(const MultiBlockProblem& problem, Rng& rng) {
  Iterate w;
  for (const auto& blk : problem.blocks)
    w.x.push_back(blk.prox->prox(gauss_sample(rng, blk.A.cols), 1.0));
  w.lambda = gauss_sample(rng, problem.m());
  if (problem.sense == Sense::Inequality)
    for (double& v : w.lambda) v = std::max(v, 0.0);
  return w;
}

}  // namespace

MarginReport check_prediction_inequality(const MultiBlockProblem& problem,
                                         const Iterate& w_k,
                                         const PredictionPair& pair,
                                         const HMetric& metric, int samples,
                                         Rng& rng) {
  const Iterate& wbar = pair.predictor;
  const double theta_bar = objective_value(problem, wbar.x);
  const Iterate f_bar = vi_operator(problem, wbar);
  const Iterate h_step = metric.apply(iterate_sub(w_k, wbar));

  MarginReport report;
  report.samples = samples;
  bool first = true;
  for (int k = 0; k < samples; ++k) {
    const Iterate w = sample_omega(problem, rng);
    const Iterate d = iterate_sub(w, wbar);
    const double lhs =
        objective_value(problem, w.x) - theta_bar + iterate_dot(d, f_bar);
    const double rhs = iterate_dot(d, h_step);
    const double margin = lhs - rhs;
    if (first || margin < report.min_margin) report.min_margin = margin;
    first = false;
  }
  return report;
}

MarginReport check_prediction_inequality(const Problem& problem, double beta,
                                         const Iterate& w_k,
                                         const PredictionPair& pair,
                                         const HMetric& metric, int samples,
                                         Rng& rng) {
  return check_prediction_inequality(as_multiblock(problem, beta), w_k, pair,
                                     metric, samples, rng);
}

ContractionReport check_contraction(
    const std::vector<std::pair<Iterate, Iterate>>& trajectory,
    const Iterate& w_star, const HMetric& metric, double alpha) {
  ContractionReport report;
  for (const auto& [w_k, wbar_k] : trajectory) {
    const Iterate w_next = correct({w_k, wbar_k}, alpha);
    const double lhs = metric.dist_sq(w_next, w_star);
    const double rhs = metric.dist_sq(w_k, w_star) -
                       alpha * (2.0 - alpha) * metric.dist_sq(w_k, wbar_k);
    report.worst_violation = std::max(report.worst_violation, lhs - rhs);
    ++report.steps;
  }
  return report;
}

}  // namespace dpbalm
