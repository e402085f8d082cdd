/*
 Copyright 2026 The msddp Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "msddp/backward_sweep.hpp"
#include "msddp/derivatives.hpp"
#include "msddp/problems.hpp"
#include "msddp/rollout.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace msddp {
namespace {

using testing::dense_kkt_solution;
using testing::lq_cost;
using testing::make_lq_instance;
using testing::random_iterate;
using testing::relative_error;

BackwardPassResult sweep(const Trajectory& t, const OcpDefinition& ocp, const ShootingPlan& plan,
                         SweepVariant variant, double regularization = 0.0) {
  const LocalModel local = expand(t, ocp, ExpansionOrder::kSecond);
  SweepOptions opts;
  opts.variant = variant;
  opts.regularization = regularization;
  return backward_sweep(local, t, plan, opts);
}

void expect_same(const BackwardPassResult& a, const BackwardPassResult& b, double tol) {
  const int N = a.policy.horizon();
  for (int k = 0; k < N; ++k) {
    EXPECT_LE(relative_error(a.policy.feedforward[k], b.policy.feedforward[k]), tol) << k;
    EXPECT_LE(relative_error(a.policy.gain[k], b.policy.gain[k]), tol) << k;
  }
  for (int k = 0; k <= N; ++k) {
    EXPECT_LE(relative_error(a.value.hessian[k], b.value.hessian[k]), tol) << k;
    EXPECT_LE(relative_error(a.value.gradient[k], b.value.gradient[k]), tol) << k;
  }
}

// x' = 2x + u, l = x^2 + u^2, phi = x^2, x0 = 1, u0 = 0.
TEST(BackwardSweep, ScalarHandCase) {
  OcpDefinition ocp;
  ocp.dynamics = std::make_shared<LinearDiscreteModel>(MatrixXd::Constant(1, 1, 2.0),
                                                       MatrixXd::Constant(1, 1, 1.0));
  ocp.cost = std::make_shared<QuadraticCost>(VectorXd::Zero(1), MatrixXd::Identity(1, 1),
                                             MatrixXd::Identity(1, 1), MatrixXd::Identity(1, 1));
  ocp.initial_state = VectorXd::Constant(1, 1.0);
  ocp.horizon = 1;
  ocp.dt = 1.0;
  const Trajectory t = measure_defects(Trajectory(1, 1, 1), ShootingPlan::single(1), ocp);
  const BackwardPassResult r =
      sweep(t, ocp, ShootingPlan::single(1), SweepVariant::ss_ddp());
  // Q_u = 4, Q_uu = 4, Q_ux = 4, Q_x = 10, Q_xx = 10.
  EXPECT_DOUBLE_EQ(r.policy.feedforward[0][0], -1.0);
  EXPECT_DOUBLE_EQ(r.policy.gain[0](0, 0), -1.0);
  EXPECT_DOUBLE_EQ(r.value.hessian[0](0, 0), 6.0);
  EXPECT_DOUBLE_EQ(r.value.gradient[0][0], 6.0);
  EXPECT_DOUBLE_EQ(r.approximate_ec.first, -4.0);
  EXPECT_DOUBLE_EQ(r.approximate_ec.second, 4.0);
  // J(u) = 1 + u^2 + (2 + u)^2 drops from 5 to 3 at u = -1.
  const Trajectory next = nonlinear_rollout(t, r.policy, ocp, 1.0);
  EXPECT_DOUBLE_EQ(total_cost(next, ocp) - total_cost(t, ocp), r.approximate_ec.at(1.0));
}

TEST(BackwardSweep, FirstOrderVariantsMatchOnLinearDynamics) {
  std::mt19937_64 rng(11);
  const auto lq = make_lq_instance(rng, 4, 2, 13);
  const ShootingPlan plan = ShootingPlan::even(13, 3);
  const Trajectory t = random_iterate(rng, lq.ocp, plan);
  expect_same(sweep(t, lq.ocp, plan, SweepVariant::ms_ddp()),
              sweep(t, lq.ocp, plan, SweepVariant::ms_ilqr()), 1e-12);
}

TEST(BackwardSweep, MultipleShootingCollapsesWithoutDefects) {
  const BenchmarkProblem p = make_problem("acrobot");
  const ShootingPlan single = ShootingPlan::single(p.ocp.horizon);
  const Trajectory t = measure_defects(p.initial_guess, single, p.ocp);
  expect_same(sweep(t, p.ocp, single, SweepVariant::ms_ddp(), 1e-3),
              sweep(t, p.ocp, single, SweepVariant::ss_ddp(), 1e-3), 1e-12);
  expect_same(sweep(t, p.ocp, single, SweepVariant::ms_ilqr(), 1e-3),
              sweep(t, p.ocp, single, SweepVariant::ss_ilqr(), 1e-3), 1e-12);
}

TEST(BackwardSweep, EmptyAndZeroPenaltyAgreeExactly) {
  std::mt19937_64 rng(12);
  const BenchmarkProblem p = make_problem("acrobot");
  const ShootingPlan plan = ShootingPlan::even(p.ocp.horizon, p.default_segments);
  const Trajectory t = random_iterate(rng, p.ocp, plan, 0.3);
  const LocalModel local = expand(t, p.ocp, ExpansionOrder::kSecond);
  SweepOptions opts;
  opts.regularization = 1e3;
  const BackwardPassResult without = backward_sweep(local, t, plan, opts);
  opts.penalty = MatrixXd::Zero(4, 4);
  const BackwardPassResult zero = backward_sweep(local, t, plan, opts);
  expect_same(without, zero, 0.0);
}

TEST(BackwardSweep, PenaltyLeavesEffectiveGradientUnchanged) {
  std::mt19937_64 rng(13);
  const auto lq = make_lq_instance(rng, 3, 2, 10);
  const ShootingPlan plan = ShootingPlan::from_indices(10, {9});
  const Trajectory t = random_iterate(rng, lq.ocp, plan);
  const LocalModel local = expand(t, lq.ocp, ExpansionOrder::kFirst);
  SweepOptions opts;
  opts.variant = SweepVariant::ms_ilqr();
  const BackwardPassResult plain = backward_sweep(local, t, plan, opts);
  opts.penalty = 5.0 * MatrixXd::Identity(3, 3);
  const BackwardPassResult penalized = backward_sweep(local, t, plan, opts);
  // Only the last step sees the shooting node: its Q_u is unchanged while
  // Q_uu grows by B' Q_d B.
  const MatrixXd& B = lq.B;
  const MatrixXd S9 = plain.value.hessian[9];
  const VectorXd s9 = plain.value.gradient[9];
  const VectorXd d = t.defects[8];
  const VectorXd Qu = local.cost[8].r + B.transpose() * (s9 + S9 * d);
  const MatrixXd Quu_plain = local.cost[8].R + B.transpose() * S9 * B;
  const MatrixXd Quu_pen = Quu_plain + 5.0 * B.transpose() * B;
  EXPECT_LE(relative_error(plain.policy.feedforward[8], -Quu_plain.llt().solve(Qu)), 1e-10);
  EXPECT_LE(relative_error(penalized.policy.feedforward[8], -Quu_pen.llt().solve(Qu)), 1e-10);
  EXPECT_GT((plain.policy.feedforward[8] - penalized.policy.feedforward[8]).norm(), 1e-6);
  EXPECT_EQ(plain.policy.feedforward[9], penalized.policy.feedforward[9]);
}

TEST(BackwardSweep, ValueHessianSymmetricPositiveSemidefinite) {
  std::mt19937_64 rng(14);
  const auto lq = make_lq_instance(rng, 5, 2, 20);
  const ShootingPlan plan = ShootingPlan::even(20, 19);
  const Trajectory t = random_iterate(rng, lq.ocp, plan);
  const BackwardPassResult r = sweep(t, lq.ocp, plan, SweepVariant::ms_ddp());
  for (const MatrixXd& S : r.value.hessian) {
    EXPECT_EQ((S - S.transpose()).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_GE(S.selfadjointView<Eigen::Lower>().eigenvalues().minCoeff(), -1e-10);
  }
}

TEST(BackwardSweep, FeedforwardIsADescentDirection) {
  std::mt19937_64 rng(15);
  const BenchmarkProblem p = make_problem("acrobot");
  const ShootingPlan plan = ShootingPlan::even(p.ocp.horizon, p.default_segments);
  const Trajectory t = random_iterate(rng, p.ocp, plan, 0.3);
  for (double reg : {1.0, 10.0, 1e3}) {
    const BackwardPassResult r = sweep(t, p.ocp, plan, SweepVariant::ms_ilqr(), reg);
    EXPECT_LT(r.approximate_ec.first, 0.0) << reg;
    EXPECT_GT(r.approximate_ec.second, 0.0) << reg;
  }
}

TEST(ExpectedCost, ExactModelEqualsRealizedLqChange) {
  std::mt19937_64 rng(16);
  for (int trial = 0; trial < 5; ++trial) {
    const auto lq = make_lq_instance(rng, 4, 2, 16);
    const ShootingPlan plan = ShootingPlan::even(16, 5);
    const Trajectory t = random_iterate(rng, lq.ocp, plan);
    const LocalModel local = expand(t, lq.ocp, ExpansionOrder::kSecond);
    const BackwardPassResult r = backward_sweep(local, t, plan, SweepOptions{});
    const ExpectedCostCoefficients ec = expected_cost_coefficients(r.policy, local, t);
    const double J = lq_cost(lq, t);
    for (double alpha : {1.0, 0.5, 0.25}) {
      const double realized = lq_cost(lq, nonlinear_rollout(t, r.policy, lq.ocp, alpha)) - J;
      EXPECT_NEAR(ec.at(alpha), realized, 1e-10 * std::max(1.0, std::abs(J))) << alpha;
    }
  }
}

TEST(ExpectedCost, ApproximateModelExactWithoutDefects) {
  std::mt19937_64 rng(17);
  const auto lq = make_lq_instance(rng, 3, 2, 12);
  const ShootingPlan single = ShootingPlan::single(12);
  const Trajectory t = random_iterate(rng, lq.ocp, single);
  const LocalModel local = expand(t, lq.ocp, ExpansionOrder::kFirst);
  SweepOptions opts;
  opts.variant = SweepVariant::ss_ilqr();
  const BackwardPassResult r = backward_sweep(local, t, single, opts);
  const ExpectedCostCoefficients exact = expected_cost_coefficients(r.policy, local, t);
  const double scale = std::abs(exact.first);
  EXPECT_NEAR(r.approximate_ec.first, exact.first, 1e-10 * scale);
  EXPECT_NEAR(r.approximate_ec.second, exact.second, 1e-10 * scale);
}

TEST(ExpectedCost, ApproximateModelMissesDefectTerms) {
  std::mt19937_64 rng(18);
  const auto lq = make_lq_instance(rng, 3, 2, 12);
  const ShootingPlan plan = ShootingPlan::every_node(12);
  const Trajectory t = random_iterate(rng, lq.ocp, plan);
  const LocalModel local = expand(t, lq.ocp, ExpansionOrder::kFirst);
  SweepOptions opts;
  opts.variant = SweepVariant::ms_ilqr();
  const BackwardPassResult r = backward_sweep(local, t, plan, opts);
  const ExpectedCostCoefficients exact = expected_cost_coefficients(r.policy, local, t);
  EXPECT_GT(std::abs(r.approximate_ec.at(1.0) - exact.at(1.0)), 1e-3 * std::abs(exact.at(1.0)));
}

TEST(BackwardSweep, ReportsFailingNode) {
  std::mt19937_64 rng(19);
  const auto lq = make_lq_instance(rng, 3, 2, 6);
  const Trajectory t = random_iterate(rng, lq.ocp, ShootingPlan::single(6));
  try {
    sweep(t, lq.ocp, ShootingPlan::single(6), SweepVariant::ss_ddp(), -1e6);
    FAIL();
  } catch (const NotPositiveDefinite& e) {
    EXPECT_EQ(e.node(), 5);
  }
}

TEST(BackwardSweep, SingleShootingRejectsDefects) {
  std::mt19937_64 rng(20);
  const auto lq = make_lq_instance(rng, 3, 2, 6);
  const ShootingPlan plan = ShootingPlan::even(6, 5);
  const Trajectory t = random_iterate(rng, lq.ocp, plan);
  EXPECT_THROW(sweep(t, lq.ocp, plan, SweepVariant::ss_ddp()), std::invalid_argument);
  EXPECT_THROW(sweep(t, lq.ocp, plan, SweepVariant::ss_ilqr()), std::invalid_argument);
}

TEST(BackwardSweep, SecondOrderNeedsTensors) {
  std::mt19937_64 rng(21);
  const auto lq = make_lq_instance(rng, 2, 1, 4);
  const ShootingPlan single = ShootingPlan::single(4);
  const Trajectory t = random_iterate(rng, lq.ocp, single);
  const LocalModel local = expand(t, lq.ocp, ExpansionOrder::kFirst);
  EXPECT_THROW(backward_sweep(local, t, single, SweepOptions{}), std::invalid_argument);
}

TEST(BackwardSweep, FullStepReachesKktSolution) {
  std::mt19937_64 rng(22);
  for (int horizon : {2, 7, 25}) {
    const auto lq = make_lq_instance(rng, 4, 2, horizon);
    const Trajectory oracle = dense_kkt_solution(lq);
    for (const ShootingPlan& plan :
         {ShootingPlan::single(horizon), ShootingPlan::every_node(horizon)}) {
      const Trajectory t = random_iterate(rng, lq.ocp, plan);
      const BackwardPassResult r = sweep(t, lq.ocp, plan, SweepVariant::ms_ddp());
      const Trajectory next = nonlinear_rollout(t, r.policy, lq.ocp, 1.0);
      EXPECT_LE(testing::stacked_distance(next, oracle), 1e-8 * testing::stacked_distance(oracle, t))
          << horizon;
      EXPECT_EQ(total_defect_norm(next), 0.0);
    }
  }
}

}  // namespace
}  // namespace msddp
