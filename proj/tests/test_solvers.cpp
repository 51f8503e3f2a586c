#include <doctest.h>

#include <cmath>

#include "dpbalm/diagnostics.hpp"
#include "dpbalm/instances.hpp"
#include "dpbalm/solvers.hpp"
#include "test_util.hpp"

using namespace dpbalm;

namespace {

// Wraps an oracle and records every point handed to prox().
class RecordingProx final : public ProxOracle {
 public:
  explicit RecordingProx(ProxPtr inner) : inner_(std::move(inner)) {}
  Vec prox(const Vec& p, double w) const override {
    calls.push_back(p);
    return inner_->prox(p, w);
  }
  double value(const Vec& x) const override { return inner_->value(x); }
  bool contains(const Vec& x) const override { return inner_->contains(x); }
  mutable std::vector<Vec> calls;

 private:
  ProxPtr inner_;
};

Problem one_dim_problem() {
  Problem p;
  p.prox = make_l1_prox();
  p.A = Mat::identity(1);
  p.b = {0.0};
  return p;
}

}  // namespace

TEST_CASE("correct") {
  const Iterate cur{{Vec{2.0}}, Vec{2.0}};
  const Iterate pred{{Vec{0.0}}, Vec{0.0}};

  SUBCASE("alpha = 1 returns the predictor exactly") {
    const Iterate out = correct({cur, pred}, 1.0);
    CHECK(out.x0() == pred.x0());
    CHECK(out.lambda == pred.lambda);
  }
  SUBCASE("midpoint") {
    const Iterate out = correct({cur, pred}, 0.5);
    CHECK(out.x0()[0] == doctest::Approx(1.0));
    CHECK(out.lambda[0] == doctest::Approx(1.0));
  }
  SUBCASE("extrapolation") {
    const Iterate out = correct({{{Vec{0.0}}, Vec{0.0}}, {{Vec{1.0}}, Vec{1.0}}}, 1.5);
    CHECK(out.x0()[0] == doctest::Approx(1.5));
    CHECK(out.lambda[0] == doctest::Approx(1.5));
  }
  SUBCASE("alpha out of range") {
    CHECK_THROWS_AS(correct({cur, pred}, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(correct({cur, pred}, 0.0), std::invalid_argument);
  }
}

TEST_CASE("dp_balm_predict hand case") {
  const Problem p = one_dim_problem();
  SolverConfig cfg;
  cfg.beta = 1.0;
  cfg.delta = 1.0;
  const CholFactor F = factor_metric(p.A, cfg.beta, cfg.delta);  // M = 2

  const PredictionPair pair =
      dp_balm_predict(p, Iterate{{Vec{1.0}}, Vec{0.0}}, cfg, F);
  CHECK(pair.predictor.lambda[0] == doctest::Approx(-0.5).epsilon(1e-14));
  // shrink(1 + (2*(-0.5) - 0), 1) = shrink(0, 1) = 0
  CHECK(pair.predictor.x0()[0] == doctest::Approx(0.0));
}

TEST_CASE("dp_balm_predict keeps lambda fixed on feasible iterates") {
  Problem p = one_dim_problem();
  p.b = {0.7};
  SolverConfig cfg;
  const CholFactor F = factor_metric(p.A, cfg.beta, cfg.delta);
  const PredictionPair pair =
      dp_balm_predict(p, Iterate{{Vec{0.7}}, Vec{0.3}}, cfg, F);
  CHECK(pair.predictor.lambda[0] == doctest::Approx(0.3).epsilon(1e-14));
}

TEST_CASE("balm_predict hand case") {
  const Problem p = one_dim_problem();
  SolverConfig cfg;
  cfg.beta = 1.0;
  cfg.delta = 1.0;
  const CholFactor F = factor_metric(p.A, cfg.beta, cfg.delta);

  const PredictionPair pair =
      balm_predict(p, Iterate{{Vec{0.0}}, Vec{2.0}}, cfg, F);
  CHECK(pair.predictor.x0()[0] == doctest::Approx(1.0));
  // lambda_bar = 2 - (1/2)(2*1 - 0) = 1
  CHECK(pair.predictor.lambda[0] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("prediction update order") {
  // DP-BALM: the prox input must depend on the freshly computed lambda_bar;
  // BALM: the prox input must use lambda^k only.
  Problem p;
  auto rec = std::make_shared<RecordingProx>(make_l1_prox());
  p.prox = rec;
  Rng rng(5);
  p.A = test::random_matrix(3, 5, rng);
  p.b = gauss_sample(rng, 3);
  SolverConfig cfg;
  cfg.beta = 2.0;
  cfg.delta = 0.5;
  const CholFactor F = factor_metric(p.A, cfg.beta, cfg.delta);

  Iterate w{{gauss_sample(rng, 5)}, gauss_sample(rng, 3)};

  SUBCASE("dual-primal order") {
    const PredictionPair pair = dp_balm_predict(p, w, cfg, F);
    REQUIRE(rec->calls.size() == 1);
    Vec expected = w.x0();
    Vec t(3);
    for (int i = 0; i < 3; ++i)
      t[i] = 2.0 * pair.predictor.lambda[i] - w.lambda[i];
    axpy(1.0 / cfg.beta, matTvec(p.A, t), expected);
    CHECK(vnorm(vsub(rec->calls[0], expected)) <= 1e-13);
    // and not the lambda^k-driven point of the primal-dual order
    Vec primal_first = w.x0();
    axpy(1.0 / cfg.beta, matTvec(p.A, w.lambda), primal_first);
    CHECK(vnorm(vsub(rec->calls[0], primal_first)) > 1e-8);
  }
  SUBCASE("primal-dual order") {
    balm_predict(p, w, cfg, F);
    REQUIRE(rec->calls.size() == 1);
    Vec expected = w.x0();
    axpy(1.0 / cfg.beta, matTvec(p.A, w.lambda), expected);
    CHECK(vnorm(vsub(rec->calls[0], expected)) <= 1e-13);
  }
}

TEST_CASE("dual step solves the quadratic minimization") {
  // lambda_bar must minimize (1/2)(l - l_k)^T M (l - l_k) + l^T (A x - b);
  // checked against a fresh stationarity solve on the assembled M.
  Rng rng(9);
  Problem p;
  p.prox = make_l1_prox();
  p.A = test::random_matrix(4, 7, rng);
  p.b = gauss_sample(rng, 4);
  SolverConfig cfg;
  cfg.beta = 3.0;
  cfg.delta = 0.1;
  const CholFactor F = factor_metric(p.A, cfg.beta, cfg.delta);

  const Iterate w{{gauss_sample(rng, 7)}, gauss_sample(rng, 4)};
  const PredictionPair pair = dp_balm_predict(p, w, cfg, F);

  Mat M(4, 4);
  add_scaled_gram_outer(M, p.A, 1.0 / cfg.beta);
  for (int i = 0; i < 4; ++i) M(i, i) += cfg.delta;
  const Vec g = vsub(matvec(p.A, w.x0()), p.b);
  const Vec lbar_ref = vsub(w.lambda, cholesky(M).solve(g));
  CHECK(vnorm(vsub(pair.predictor.lambda, lbar_ref)) <=
        1e-10 * (1.0 + vnorm(lbar_ref)));
}

TEST_CASE("fixed points of all predictors and solvers") {
  const Problem p = generate_basis_pursuit({30, 15, 3, 77});
  SolverConfig cfg;
  const Iterate w_star = reference_saddle(p, cfg);
  const double scale = 1.0 + iterate_norm(w_star);

  const CholFactor F = factor_metric(p.A, cfg.beta, cfg.delta);
  SUBCASE("dp-balm predictor") {
    const PredictionPair pair = dp_balm_predict(p, w_star, cfg, F);
    CHECK(iterate_norm(iterate_sub(pair.predictor, w_star)) <= 1e-10 * scale);
  }
  SUBCASE("balm predictor") {
    const PredictionPair pair = balm_predict(p, w_star, cfg, F);
    CHECK(iterate_norm(iterate_sub(pair.predictor, w_star)) <= 1e-10 * scale);
  }
  SUBCASE("solve_dp_balm converges immediately") {
    SolverConfig c = cfg;
    c.stop_rule = StopRule::FixedPointResidual;
    c.tol = 1e-11;
    const SolveReport rep = solve_dp_balm(p, c, w_star);
    CHECK(rep.status == SolveStatus::Converged);
    CHECK(rep.iterations == 0);
    CHECK(rep.history.size() == 1);
  }
  SUBCASE("lalm and pda do not move") {
    const double rho = spectral_radius_gram(p.A).value;
    SolverConfig c = cfg;
    c.stop_rule = StopRule::FixedPointResidual;
    c.tol = 1e-300;  // never stops; run exactly one step
    c.max_iter = 1;
    c.beta = 0.01;
    c.r = c.beta * rho + 0.001;
    SolveReport rep = solve_lalm(p, c, w_star);
    CHECK(rep.history[0].fp_res_h <= 1e-11 * scale);

    c = cfg;
    c.stop_rule = StopRule::FixedPointResidual;
    c.tol = 1e-300;
    c.max_iter = 1;
    c.r = c.s = std::sqrt(rho + 0.001);
    rep = solve_pda(p, c, w_star);
    CHECK(rep.history[0].fp_res_h <= 1e-11 * scale);
  }
}

TEST_CASE("benchmark-scale iteration counts") {
  const Problem p = generate_basis_pursuit({100, 0, 0, 1});
  SolverConfig cfg;  // beta=10, delta=1e-3, alpha=1, ReE tol 1e-7
  const SolveReport dp = solve_dp_balm(p, cfg, zero_iterate(p));
  CHECK(dp.status == SolveStatus::Converged);
  CHECK(dp.iterations >= 40);
  CHECK(dp.iterations <= 320);
  CHECK(static_cast<int>(dp.history.size()) == dp.iterations + 1);

  const SolveReport ba = solve_balm(p, cfg, zero_iterate(p));
  CHECK(ba.status == SolveStatus::Converged);
  CHECK(std::abs(ba.iterations - dp.iterations) <=
        std::max(20.0, 0.15 * dp.iterations));
}

TEST_CASE("step-size validation") {
  const Problem p = generate_basis_pursuit({20, 10, 2, 3});
  const double rho = spectral_radius_gram(p.A).value;
  SolverConfig cfg;

  SUBCASE("lalm rejects r <= beta rho") {
    cfg.beta = 0.01;
    cfg.r = cfg.beta * rho * 0.5;
    const SolveReport rep = solve_lalm(p, cfg, zero_iterate(p));
    CHECK(rep.status == SolveStatus::InvalidConfig);
    CHECK(rep.message.find("rho") != std::string::npos);
  }
  SUBCASE("pda rejects r*s < rho") {
    cfg.r = cfg.s = std::sqrt(rho) * 0.5;
    const SolveReport rep = solve_pda(p, cfg, zero_iterate(p));
    CHECK(rep.status == SolveStatus::InvalidConfig);
  }
  SUBCASE("relative-error rule needs a known solution") {
    Problem blind = p;
    blind.known_solution.reset();
    const SolveReport rep = solve_dp_balm(blind, cfg, zero_iterate(p));
    CHECK(rep.status == SolveStatus::InvalidConfig);
  }
  SUBCASE("balm with alpha != 1 requires the extension flag") {
    cfg = {};
    cfg.alpha = 1.5;
    SolveReport rep = solve_balm(p, cfg, zero_iterate(p));
    CHECK(rep.status == SolveStatus::InvalidConfig);
    cfg.balm_relaxed = true;
    rep = solve_balm(p, cfg, zero_iterate(p));
    CHECK(rep.status == SolveStatus::Converged);
    CHECK(rep.relaxed_correction);
  }
  SUBCASE("invalid alpha") {
    cfg = {};
    cfg.alpha = 2.5;
    const SolveReport rep = solve_dp_balm(p, cfg, zero_iterate(p));
    CHECK(rep.status == SolveStatus::InvalidConfig);
  }
}
