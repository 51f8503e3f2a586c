#include <doctest.h>

#include <cmath>

#include "dpbalm/diagnostics.hpp"
#include "dpbalm/instances.hpp"
#include "dpbalm/multiblock.hpp"
#include "dpbalm/solvers.hpp"
#include "test_util.hpp"

using namespace dpbalm;

TEST_CASE("build_metric") {
  SUBCASE("p = 1 matches factor_metric") {
    Rng rng(21);
    Problem p;
    p.prox = make_l1_prox();
    p.A = test::random_matrix(4, 6, rng);
    p.b = Vec(4, 0.0);
    const MetricMp metric = build_metric(as_multiblock(p, 2.5), 0.3);
    const CholFactor F = factor_metric(p.A, 2.5, 0.3);
    CHECK(metric.chol.L.data == F.L.data);
    CHECK(metric.top_eig >= 0.3);
  }
  SUBCASE("two identity blocks") {
    MultiBlockProblem mp;
    mp.b = {0.0, 0.0};
    mp.blocks.push_back({make_l1_prox(), Mat::identity(2), 1.0});
    mp.blocks.push_back({make_l1_prox(), Mat::identity(2), 1.0});
    const MetricMp metric = build_metric(mp, 1.0);  // M = 3 I
    CHECK(metric.chol.L(0, 0) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
    CHECK(metric.top_eig == doctest::Approx(3.0).epsilon(1e-8));
  }
  SUBCASE("zero blocks leave delta I") {
    MultiBlockProblem mp;
    mp.b = {0.0, 0.0};
    mp.blocks.push_back({make_l1_prox(), Mat(2, 3), 1.0});
    const MetricMp metric = build_metric(mp, 0.25);
    CHECK(metric.chol.L(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(metric.chol.L(1, 1) == doctest::Approx(0.5).epsilon(1e-14));
  }
}

TEST_CASE("dual_subproblem") {
  // M = I via a single zero block and delta = 1.
  MultiBlockProblem mp;
  mp.b = {0.0, 0.0};
  mp.blocks.push_back({make_l1_prox(), Mat(2, 2), 1.0});
  const MetricMp metric = build_metric(mp, 1.0);

  SUBCASE("zero gradient is a fixed point in both senses") {
    const Vec lk{0.4, -0.7};
    const DualResult eq =
        dual_subproblem(metric, lk, {0.0, 0.0}, Sense::Equality, 1e-12, 1000);
    CHECK(eq.lambda == lk);
    const Vec lk_pos{0.4, 0.7};
    const DualResult in = dual_subproblem(metric, lk_pos, {0.0, 0.0},
                                          Sense::Inequality, 1e-12, 1000);
    CHECK(vnorm(vsub(in.lambda, lk_pos)) <= 1e-12);
  }
  SUBCASE("hand KKT cases") {
    const DualResult eq = dual_subproblem(metric, {0.0, 0.0}, {1.0, -1.0},
                                          Sense::Equality, 1e-12, 1000);
    CHECK(eq.lambda[0] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(eq.lambda[1] == doctest::Approx(1.0).epsilon(1e-12));

    const DualResult in = dual_subproblem(metric, {0.0, 0.0}, {1.0, -1.0},
                                          Sense::Inequality, 1e-12, 1000);
    CHECK(in.converged);
    CHECK(in.lambda[0] == doctest::Approx(0.0));
    CHECK(in.lambda[1] == doctest::Approx(1.0).epsilon(1e-10));
  }
  SUBCASE("inactive constraints match the unconstrained solve") {
    Rng rng(33);
    MultiBlockProblem dense;
    dense.b = Vec(3, 0.0);
    dense.blocks.push_back({make_l1_prox(), test::random_matrix(3, 5, rng), 2.0});
    const MetricMp dm = build_metric(dense, 0.5);
    // lambda_k far in the positive orthant and a small gradient keep the
    // bound inactive at the optimum.
    const Vec lk{5.0, 6.0, 7.0};
    const Vec g{0.1, -0.2, 0.15};
    const DualResult in =
        dual_subproblem(dm, lk, g, Sense::Inequality, 1e-12, 50000);
    const Vec unc = vsub(lk, dm.chol.solve(g));
    CHECK(in.converged);
    CHECK(vnorm(vsub(in.lambda, unc)) <= 1e-9);
  }
  SUBCASE("exhausted inner cap is flagged") {
    // Non-uniform eigenvalues so a single projected-gradient step cannot
    // reach the tolerance.
    Rng rng(71);
    MultiBlockProblem dense;
    dense.b = Vec(3, 0.0);
    dense.blocks.push_back(
        {make_l1_prox(), test::random_matrix(3, 5, rng), 1.0});
    const MetricMp dm = build_metric(dense, 0.5);
    const DualResult in = dual_subproblem(dm, {0.0, 0.0, 0.0},
                                          {1.0, -1.0, 0.5}, Sense::Inequality,
                                          1e-14, 1);
    CHECK_FALSE(in.converged);
  }
}

TEST_CASE("p = 1 reduction is bit-for-bit") {
  const Problem p = generate_basis_pursuit({24, 12, 2, 5});
  SolverConfig cfg;
  cfg.stop_rule = StopRule::FixedPointResidual;
  cfg.tol = 1e-9;
  cfg.record_iterates = true;

  SUBCASE("predict") {
    const CholFactor F = factor_metric(p.A, cfg.beta, cfg.delta);
    const MultiBlockProblem mp = as_multiblock(p, cfg.beta);
    const MetricMp metric = build_metric(mp, cfg.delta);
    Rng rng(2);
    const Iterate w{{gauss_sample(rng, 24)}, gauss_sample(rng, 12)};
    const PredictionPair a = dp_balm_predict(p, w, cfg, F);
    const PredictionPair b =
        multiblock_predict(mp, w, metric, cfg.inner_tol, cfg.inner_max_iter);
    CHECK(a.predictor.x0() == b.predictor.x0());
    CHECK(a.predictor.lambda == b.predictor.lambda);
  }
  SUBCASE("full trajectory") {
    const SolveReport a = solve_dp_balm(p, cfg, zero_iterate(p));
    const SolveReport b =
        solve_multiblock(as_multiblock(p, cfg.beta), cfg, zero_iterate(p));
    CHECK(a.status == SolveStatus::Converged);
    CHECK(a.iterations == b.iterations);
    REQUIRE(a.trajectory.size() == b.trajectory.size());
    for (size_t k = 0; k < a.trajectory.size(); ++k) {
      CHECK(a.trajectory[k].first.x0() == b.trajectory[k].first.x0());
      CHECK(a.trajectory[k].first.lambda == b.trajectory[k].first.lambda);
    }
    CHECK(a.final_iterate.x0() == b.final_iterate.x0());
    CHECK(a.final_iterate.lambda == b.final_iterate.lambda);
  }
}

TEST_CASE("predictor fixes feasible multipliers") {
  MultiBlockProblem mp;
  mp.b = {2.0};
  mp.blocks.push_back({make_l1_prox(), Mat::identity(1), 1.0});
  mp.blocks.push_back({make_quadratic_prox(Mat::identity(1), Vec(1, 0.0)),
                       Mat::identity(1), 1.0});
  const MetricMp metric = build_metric(mp, 1e-3);
  const Iterate w{{Vec{1.5}, Vec{0.5}}, Vec{0.8}};  // x1 + x2 = b
  const PredictionPair pair = multiblock_predict(mp, w, metric, 1e-12, 1000);
  CHECK(pair.predictor.lambda[0] == doctest::Approx(0.8).epsilon(1e-14));
}

TEST_CASE("two-block equality instance") {
  // min |x1| + 0.5 x2^2  s.t.  x1 + x2 = 2; optimum x1 = x2 = 1.
  MultiBlockProblem mp;
  mp.b = {2.0};
  mp.blocks.push_back({make_l1_prox(), Mat::identity(1), 1.0});
  mp.blocks.push_back({make_quadratic_prox(Mat::identity(1), Vec(1, 0.0)),
                       Mat::identity(1), 1.0});

  SolverConfig cfg;
  cfg.beta = 1.0;
  cfg.stop_rule = StopRule::FixedPointResidual;
  cfg.tol = 1e-11;
  const SolveReport rep = solve_multiblock(mp, cfg, zero_iterate(mp));
  REQUIRE(rep.status == SolveStatus::Converged);
  CHECK(rep.final_iterate.x[0][0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(rep.final_iterate.x[1][0] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("tiny inequality LP") {
  // min x1 + 2 x2  s.t.  x >= (1,1) elementwise, x >= 0; optimum (1,1).
  MultiBlockProblem mp;
  mp.b = {1.0, 1.0};
  mp.sense = Sense::Inequality;
  mp.blocks.push_back(
      {make_linear_nonneg_prox({1.0, 2.0}), Mat::identity(2), 1.0});

  SolverConfig cfg;
  cfg.beta = 1.0;
  cfg.stop_rule = StopRule::FixedPointResidual;
  cfg.tol = 1e-10;
  const SolveReport rep = solve_multiblock(mp, cfg, zero_iterate(mp));
  REQUIRE(rep.status == SolveStatus::Converged);
  CHECK(rep.final_iterate.x[0][0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(rep.final_iterate.x[0][1] == doctest::Approx(1.0).epsilon(1e-6));

  const auto oracle =
      test::lp_vertex_oracle(Mat::identity(2), mp.b, {1.0, 2.0});
  REQUIRE(oracle.bounded);
  CHECK(oracle.x[0] == doctest::Approx(1.0));
  CHECK(oracle.x[1] == doctest::Approx(1.0));

  SUBCASE("corrected multipliers stay non-negative for alpha <= 1") {
    SolverConfig c = cfg;
    c.alpha = 0.8;
    const SolveReport r = solve_multiblock(mp, c, zero_iterate(mp));
    for (double v : r.final_iterate.lambda) CHECK(v >= 0.0);
  }
}

TEST_CASE("generalized prediction inequality and H positivity") {
  Rng rng(44);
  SolverConfig cfg;
  for (int trial = 0; trial < 6; ++trial) {
    const Sense sense = trial % 2 ? Sense::Inequality : Sense::Equality;
    MultiBlockProblem mp;
    const int m = 3;
    mp.b = gauss_sample(rng, m);
    mp.sense = sense;
    mp.blocks.push_back({make_l1_prox(), test::random_matrix(m, 4, rng),
                         0.5 + 2.0 * rng.next_uniform()});
    mp.blocks.push_back(
        {make_quadratic_prox(test::random_spd(3, rng), gauss_sample(rng, 3)),
         test::random_matrix(m, 3, rng), 0.5 + 2.0 * rng.next_uniform()});

    const MetricMp metric = build_metric(mp, cfg.delta);
    const HMetric h = h_metric(mp, cfg.delta);

    // Sum-of-squares identity vs the assembled quadratic form.
    const Mat H = assemble_h(h);
    CHECK_NOTHROW(cholesky(H));
    Iterate w = zero_iterate(mp);
    for (int k = 0; k < 8; ++k) {
      const PredictionPair pair =
          multiblock_predict(mp, w, metric, cfg.inner_tol, cfg.inner_max_iter);
      const MarginReport mr =
          check_prediction_inequality(mp, w, pair, h, 60, rng);
      CHECK(mr.min_margin >= -1e-8);
      w = correct(pair, cfg.alpha);
    }
  }
}
