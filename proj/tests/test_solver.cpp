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

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "msddp/problems.hpp"
#include "msddp/solver.hpp"
#include "oracles.hpp"

namespace msddp {
namespace {

using testing::dense_kkt_solution;
using testing::make_lq_instance;
using testing::random_iterate;
using testing::stacked_distance;

SolverConfig parse_config(const std::string& text) {
  std::istringstream in(text);
  return solver_config_from(KeyValueFile::parse(in));
}

TEST(Solve, LqReachesKktSolution) {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 4; ++trial) {
    const auto lq = make_lq_instance(rng, 4, 2, 22);
    const Trajectory oracle = dense_kkt_solution(lq);
    for (const std::string name : {"msddp-nonlinear", "msddp-hybrid", "msilqr-nonlinear"}) {
      const ShootingPlan plan = ShootingPlan::even(22, 7);
      const Trajectory guess = random_iterate(rng, lq.ocp, plan);
      const SolveResult r = solve(lq.ocp, plan, guess, preset(name));
      EXPECT_EQ(r.status, SolveStatus::kConverged) << name;
      EXPECT_LE(r.accepted_iterations, 2) << name;
      EXPECT_LE(stacked_distance(r.trajectory, oracle), 1e-8 * stacked_distance(guess, oracle))
          << name;
    }
    const ShootingPlan single = ShootingPlan::single(22);
    const SolveResult r = solve(lq.ocp, single, random_iterate(rng, lq.ocp, single), preset("ssddp"));
    EXPECT_EQ(r.status, SolveStatus::kConverged);
    EXPECT_LE(stacked_distance(r.trajectory, oracle), 1e-8 * std::max(1.0, oracle.states[0].norm()));
  }
}

TEST(Solve, SingleShootingNeverOpensDefects) {
  const BenchmarkProblem p = make_problem("acrobot");
  const ShootingPlan single = ShootingPlan::single(p.ocp.horizon);
  SolverConfig config = preset("ssilqr");
  config.max_iterations = 15;
  int seen = 0;
  solve(p.ocp, single, p.initial_guess, config, [&](int, const Trajectory& t) {
    EXPECT_EQ(total_defect_norm(t), 0.0);
    ++seen;
    return true;
  });
  EXPECT_GT(seen, 1);
}

TEST(Solve, Deterministic) {
  const BenchmarkProblem p = make_problem("acrobot");
  const ShootingPlan plan = ShootingPlan::even(p.ocp.horizon, p.default_segments);
  SolverConfig config = preset("msilqr-nonlinear");
  config.max_iterations = 10;
  const SolveResult a = solve(p.ocp, plan, p.initial_guess, config);
  const SolveResult b = solve(p.ocp, plan, p.initial_guess, config);
  ASSERT_EQ(a.history.size(), b.history.size());
  for (std::size_t i = 0; i < a.history.size(); ++i) {
    EXPECT_EQ(a.history[i].cost, b.history[i].cost);
    EXPECT_EQ(a.history[i].defect, b.history[i].defect);
    EXPECT_EQ(a.history[i].alpha, b.history[i].alpha);
    EXPECT_EQ(a.history[i].mu, b.history[i].mu);
  }
  EXPECT_EQ(a.trajectory.states, b.trajectory.states);
  EXPECT_EQ(a.trajectory.controls, b.trajectory.controls);
}

TEST(Solve, HistoryStartsWithInitialIterate) {
  const BenchmarkProblem p = make_problem("acrobot");
  const ShootingPlan plan = ShootingPlan::even(p.ocp.horizon, p.default_segments);
  SolverConfig config = preset("msilqr-nonlinear");
  config.max_iterations = 3;
  const SolveResult r = solve(p.ocp, plan, p.initial_guess, config);
  ASSERT_EQ(r.history.size(), 4u);
  EXPECT_EQ(r.history[0].iteration, 0);
  EXPECT_EQ(r.history[0].alpha, 0.0);
  EXPECT_DOUBLE_EQ(r.history[0].cost,
                   total_cost(measure_defects(p.initial_guess, plan, p.ocp), p.ocp));
  EXPECT_EQ(r.status, SolveStatus::kMaxIterations);
  EXPECT_EQ(r.iterations, 3);

  std::ostringstream out;
  write_history_csv(out, r.history);
  std::istringstream lines(out.str());
  std::string header;
  std::getline(lines, header);
  EXPECT_EQ(header, "iter,cost,defect,merit,mu,alpha,lambda,ec1,ec2,wall_ms");
  int rows = 0;
  for (std::string line; std::getline(lines, line);) {
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 9);
    ++rows;
  }
  EXPECT_EQ(rows, 4);
}

TEST(Solve, ObserverCanStop) {
  const BenchmarkProblem p = make_problem("acrobot");
  const ShootingPlan plan = ShootingPlan::even(p.ocp.horizon, p.default_segments);
  const SolveResult at_start = solve(p.ocp, plan, p.initial_guess, preset("msilqr-nonlinear"),
                                     [](int, const Trajectory&) { return false; });
  EXPECT_EQ(at_start.status, SolveStatus::kStopped);
  EXPECT_EQ(at_start.iterations, 0);
  const SolveResult later = solve(p.ocp, plan, p.initial_guess, preset("msilqr-nonlinear"),
                                  [](int iter, const Trajectory&) { return iter < 2; });
  EXPECT_EQ(later.status, SolveStatus::kStopped);
  EXPECT_EQ(later.accepted_iterations, 2);
}

TEST(Solve, RejectsInconsistentInput) {
  const BenchmarkProblem p = make_problem("acrobot");
  const ShootingPlan plan = ShootingPlan::even(p.ocp.horizon, p.default_segments);
  EXPECT_THROW(solve(p.ocp, plan, p.initial_guess, preset("ssddp")), std::invalid_argument);
  EXPECT_THROW(solve(p.ocp, ShootingPlan::single(p.ocp.horizon + 1), p.initial_guess,
                     preset("msddp-nonlinear")),
               DimensionError);
  Trajectory bad = p.initial_guess;
  bad.controls[3][0] = std::nan("");
  EXPECT_THROW(solve(p.ocp, plan, bad, preset("msddp-nonlinear")), std::invalid_argument);
}

TEST(Config, PresetsAndOverrides) {
  for (const std::string& name : preset_names()) EXPECT_NO_THROW(preset(name));
  const SolverConfig filqr = preset("filqr");
  EXPECT_EQ(filqr.merit.mode, MeritMode::kCostOnly);
  EXPECT_EQ(filqr.expectation, ExpectationModel::kApproximate);
  EXPECT_EQ(filqr.variant, SweepVariant::ms_ilqr());

  const SolverConfig c = parse_config(
      "preset = msddp-hybrid\npenalty = 2\nmax_iterations = 7\nlambda_init = 0.5\n"
      "expectation = approximate\n");
  EXPECT_EQ(c.variant, SweepVariant::ms_ddp());
  EXPECT_EQ(c.rollout, RolloutKind::kHybrid);
  EXPECT_EQ(c.expectation, ExpectationModel::kApproximate);
  EXPECT_EQ(c.penalty, 2.0);
  EXPECT_EQ(c.max_iterations, 7);
  EXPECT_EQ(c.regularization.initial, 0.5);
  for (const char* key : {"penalty", "rho", "preset", "lambda_init", "tensor_step"}) {
    EXPECT_TRUE(solver_config_keys().count(key)) << key;
  }
}

TEST(Config, ErrorsNameTheKey) {
  const std::pair<std::string, std::string> cases[] = {
      {"variant = ms-sqp\n", "variant"},     {"rollout = linear\n", "rollout"},
      {"merit = armijo\n", "merit"},         {"preset = newton\n", "preset"},
      {"max_iterations = 2.5\n", "max_iterations"}, {"penalty = lots\n", "penalty"},
  };
  for (const auto& [text, key] : cases) {
    try {
      parse_config(text);
      ADD_FAILURE() << text;
    } catch (const ConfigError& e) {
      EXPECT_EQ(e.key(), key) << text;
    }
  }
  EXPECT_THROW(parse_config("penalty = -1\n"), ConfigError);
  EXPECT_THROW(parse_config("rho = 1\n"), ConfigError);
}

TEST(RateFit, RecoversSyntheticRate) {
  std::vector<double> errors = {0.5};  // outside the window, ignored
  for (double e = 1e-3; e > 1e-14; e = 2.0 * std::pow(e, 1.5)) errors.push_back(e);
  const RateFit fit = fit_rate(errors, 1e-11, 1e-2);
  ASSERT_TRUE(fit.usable);
  EXPECT_EQ(fit.points, 4);
  EXPECT_NEAR(fit.epsilon, 1.5, 1e-9);
  EXPECT_NEAR(fit.kappa, 2.0, 1e-8);
}

TEST(RateFit, NeedsThreeIteratesInWindow) {
  EXPECT_FALSE(fit_rate({1e-3, 5e-7, 1e-13}, 1e-11, 1e-2).usable);
  EXPECT_FALSE(fit_rate({1e-3, 1e-1, 1e-4, 1e-1, 1e-5}, 1e-11, 1e-2).usable);
  EXPECT_TRUE(fit_rate({1e-3, 1e-4, 1e-5}, 1e-11, 1e-2).usable);
}

TEST(LocalRate, ZeroRadiusYieldsNoUsableSample) {
  std::mt19937_64 rng(52);
  const auto lq = make_lq_instance(rng, 2, 1, 9);
  RateOptions opts;
  opts.samples = 3;
  opts.radius = 0.0;
  const auto fits =
      measure_local_rate(lq.ocp, ShootingPlan::even(9, 4), dense_kkt_solution(lq), opts,
                         preset("msddp-nonlinear"));
  ASSERT_EQ(fits.size(), 3u);
  for (int s = 0; s < 3; ++s) {
    EXPECT_EQ(fits[s].sample, s);
    EXPECT_FALSE(fits[s].usable);
  }
}

TEST(LocalRate, PerturbationStaysInsideBall) {
  std::mt19937_64 rng(53);
  const auto lq = make_lq_instance(rng, 3, 1, 9);
  RateOptions opts;
  opts.samples = 20;
  opts.radius = 1e-3;
  const auto fits = measure_local_rate(lq.ocp, ShootingPlan::even(9, 4), dense_kkt_solution(lq),
                                       opts, preset("msddp-nonlinear"));
  for (const RateFit& f : fits) {
    ASSERT_FALSE(f.errors.empty());
    // Node 0 and the controls are kept; the terminal state is re-simulated.
    EXPECT_LE(f.errors[0], 1e-3 * (1.0 + 1e-12) * 50.0);
    EXPECT_GT(f.errors[0], 0.0);
  }
}

TEST(IterateError, MatchesStackedDistance) {
  std::mt19937_64 rng(54);
  const auto lq = make_lq_instance(rng, 3, 2, 8);
  const ShootingPlan plan = ShootingPlan::every_node(8);
  const Trajectory a = random_iterate(rng, lq.ocp, plan);
  const Trajectory b = random_iterate(rng, lq.ocp, plan);
  EXPECT_NEAR(iterate_error(a, b), stacked_distance(a, b), 1e-12 * stacked_distance(a, b));
  EXPECT_THROW(iterate_error(a, Trajectory(7, 3, 2)), DimensionError);
}

}  // namespace
}  // namespace msddp
