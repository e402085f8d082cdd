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

using testing::make_lq_instance;
using testing::random_iterate;
using testing::relative_error;

struct Step {
  Trajectory nominal;
  LocalModel local;
  Policy policy;
};

Step make_step(const OcpDefinition& ocp, const ShootingPlan& plan, std::uint64_t seed,
               double scale) {
  std::mt19937_64 rng(seed);
  Step s;
  s.nominal = random_iterate(rng, ocp, plan, scale);
  s.local = expand(s.nominal, ocp, ExpansionOrder::kFirst);
  SweepOptions opts;
  opts.variant = SweepVariant::ms_ilqr();
  opts.regularization = 1.0;
  s.policy = backward_sweep(s.local, s.nominal, plan, opts).policy;
  return s;
}

class AcrobotRollout : public ::testing::Test {
 protected:
  AcrobotRollout()
      : problem(make_problem("acrobot")),
        plan(ShootingPlan::even(problem.ocp.horizon, problem.default_segments)),
        step(make_step(problem.ocp, plan, 31, 0.3)) {}
  BenchmarkProblem problem;
  ShootingPlan plan;
  Step step;
};

TEST_F(AcrobotRollout, DefectsShrinkByOneMinusAlpha) {
  for (double alpha : {1.0, 0.5, 0.125}) {
    RolloutOptions opts;
    opts.verify_defects = true;
    const Trajectory out = nonlinear_rollout(step.nominal, step.policy, problem.ocp, alpha, opts);
    for (int k = 0; k < problem.ocp.horizon; ++k) {
      EXPECT_EQ(out.defects[k], (1.0 - alpha) * step.nominal.defects[k]) << k;
    }
    const Trajectory remeasured = measure_defects(out, plan, problem.ocp);
    EXPECT_NEAR(total_defect_norm(remeasured), (1.0 - alpha) * total_defect_norm(step.nominal),
                1e-9 * std::max(1.0, total_defect_norm(step.nominal)));
  }
}

TEST_F(AcrobotRollout, FullStepClosesEveryDefect) {
  const Trajectory out = nonlinear_rollout(step.nominal, step.policy, problem.ocp, 1.0);
  EXPECT_EQ(total_defect_norm(out), 0.0);
  EXPECT_EQ(out.states[0], problem.ocp.initial_state);
}

TEST_F(AcrobotRollout, LinearRolloutIsLinearInAlpha) {
  const LinearPerturbation unit = linear_rollout(step.nominal, step.policy, step.local, 1.0);
  for (double alpha : {0.5, 0.25}) {
    const LinearPerturbation p = linear_rollout(step.nominal, step.policy, step.local, alpha);
    EXPECT_EQ(p.dx[0].norm(), 0.0);
    for (int k = 0; k < problem.ocp.horizon; ++k) {
      EXPECT_LE(relative_error(p.dx[k + 1], alpha * unit.dx[k + 1]), 1e-12) << k;
      EXPECT_LE(relative_error(p.du[k], alpha * unit.du[k]), 1e-12) << k;
    }
  }
}

TEST_F(AcrobotRollout, HybridIndependentOfSegmentOrder) {
  const int M = plan.segment_count();
  std::vector<int> reversed(M);
  for (int i = 0; i < M; ++i) reversed[i] = M - 1 - i;
  for (double alpha : {1.0, 0.5}) {
    const Trajectory forward =
        hybrid_rollout(step.nominal, step.policy, step.local, plan, problem.ocp, alpha);
    const Trajectory backward = hybrid_rollout(step.nominal, step.policy, step.local, plan,
                                               problem.ocp, alpha, reversed);
    for (int k = 0; k <= problem.ocp.horizon; ++k) EXPECT_EQ(forward.states[k], backward.states[k]);
    for (int k = 0; k < problem.ocp.horizon; ++k) {
      EXPECT_EQ(forward.controls[k], backward.controls[k]);
      EXPECT_EQ(forward.defects[k], backward.defects[k]);
    }
  }
}

TEST_F(AcrobotRollout, HybridMovesShootingStatesByLinearPrediction) {
  const double alpha = 0.5;
  const LinearPerturbation p = linear_rollout(step.nominal, step.policy, step.local, alpha);
  const Trajectory out =
      hybrid_rollout(step.nominal, step.policy, step.local, plan, problem.ocp, alpha);
  for (int j : plan.shooting_indices()) {
    EXPECT_EQ(out.states[j], step.nominal.states[j] + p.dx[j]) << j;
  }
  const Trajectory remeasured = measure_defects(out, plan, problem.ocp);
  for (int k = 0; k < problem.ocp.horizon; ++k) {
    EXPECT_LE((remeasured.defects[k] - out.defects[k]).cwiseAbs().maxCoeff(), 1e-12) << k;
  }
}

TEST_F(AcrobotRollout, RejectsStepOutsideUnitInterval) {
  EXPECT_THROW(nonlinear_rollout(step.nominal, step.policy, problem.ocp, 0.0),
               std::invalid_argument);
  EXPECT_THROW(nonlinear_rollout(step.nominal, step.policy, problem.ocp, 1.5),
               std::invalid_argument);
  EXPECT_THROW(hybrid_rollout(step.nominal, step.policy, step.local, plan, problem.ocp, -0.5),
               std::invalid_argument);
  EXPECT_THROW(hybrid_rollout(step.nominal, step.policy, step.local, plan, problem.ocp, 1.0,
                              std::vector<int>(plan.segment_count(), 0)),
               std::invalid_argument);
}

TEST(Rollout, HybridEqualsNonlinearInSingleShooting) {
  const BenchmarkProblem p = make_problem("acrobot");
  const ShootingPlan single = ShootingPlan::single(p.ocp.horizon);
  Step s;
  s.nominal = measure_defects(p.initial_guess, single, p.ocp);
  s.local = expand(s.nominal, p.ocp, ExpansionOrder::kFirst);
  SweepOptions opts;
  opts.variant = SweepVariant::ss_ilqr();
  opts.regularization = 1.0;
  s.policy = backward_sweep(s.local, s.nominal, single, opts).policy;
  for (double alpha : {1.0, 0.25}) {
    const Trajectory a = nonlinear_rollout(s.nominal, s.policy, p.ocp, alpha);
    const Trajectory b = hybrid_rollout(s.nominal, s.policy, s.local, single, p.ocp, alpha);
    for (int k = 0; k <= p.ocp.horizon; ++k) EXPECT_EQ(a.states[k], b.states[k]) << k;
  }
}

TEST(Rollout, LinearDynamicsMakeAllRolloutsAgree) {
  std::mt19937_64 rng(32);
  const auto lq = make_lq_instance(rng, 4, 2, 15);
  const ShootingPlan plan = ShootingPlan::even(15, 7);
  const Step s = make_step(lq.ocp, plan, 33, 1.0);
  for (double alpha : {1.0, 0.5, 0.25}) {
    const LinearPerturbation p = linear_rollout(s.nominal, s.policy, s.local, alpha);
    const Trajectory nl = nonlinear_rollout(s.nominal, s.policy, lq.ocp, alpha);
    const Trajectory hy = hybrid_rollout(s.nominal, s.policy, s.local, plan, lq.ocp, alpha);
    for (int k = 0; k <= 15; ++k) {
      EXPECT_LE(relative_error(nl.states[k] - s.nominal.states[k], p.dx[k]), 1e-10) << k;
      EXPECT_LE(relative_error(hy.states[k], nl.states[k]), 1e-12) << k;
    }
    for (int k = 0; k < 15; ++k) {
      EXPECT_LE(relative_error(nl.controls[k] - s.nominal.controls[k], p.du[k]), 1e-10) << k;
      EXPECT_LE((hy.defects[k] - nl.defects[k]).norm(), 1e-10 * s.nominal.defects[k].norm() + 1e-14)
          << k;
    }
  }
}

TEST(Rollout, DivergenceNamesTheNode) {
  std::mt19937_64 rng(34);
  auto lq = make_lq_instance(rng, 2, 1, 8);
  const ShootingPlan single = ShootingPlan::single(8);
  Step s = make_step(lq.ocp, single, 35, 1.0);
  for (auto& k : s.policy.feedforward) k.setConstant(1e12);
  try {
    nonlinear_rollout(s.nominal, s.policy, lq.ocp, 1.0);
    FAIL();
  } catch (const DivergenceError& e) {
    EXPECT_EQ(e.node(), 1);
  }
}

}  // namespace
}  // namespace msddp
