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

#include <string>

#include <benchmark/benchmark.h>

#include "msddp/backward_sweep.hpp"
#include "msddp/derivatives.hpp"
#include "msddp/problems.hpp"
#include "msddp/rollout.hpp"
#include "msddp/solver.hpp"

namespace {

using namespace msddp;

const char* problem_name(int index) {
  static const char* names[] = {"acrobot", "quadrotor", "arm"};
  return names[index];
}

struct Fixture {
  BenchmarkProblem problem;
  ShootingPlan plan;
  Trajectory traj;

  explicit Fixture(const char* name)
      : problem(make_problem(name)),
        plan(ShootingPlan::even(problem.ocp.horizon, problem.default_segments)),
        traj(measure_defects(problem.initial_guess, plan, problem.ocp)) {}
};

void BM_Expand(benchmark::State& state) {
  const Fixture f(problem_name(static_cast<int>(state.range(0))));
  const auto order = state.range(1) == 2 ? ExpansionOrder::kSecond : ExpansionOrder::kFirst;
  for (auto _ : state) benchmark::DoNotOptimize(expand(f.traj, f.problem.ocp, order));
  state.SetLabel(f.problem.name);
}
BENCHMARK(BM_Expand)->ArgsProduct({{0, 1, 2}, {1, 2}})->Unit(benchmark::kMillisecond);

void BM_BackwardSweep(benchmark::State& state) {
  Fixture f(problem_name(static_cast<int>(state.range(0))));
  // Converged iterate, where the second-order Q_uu is positive definite.
  f.traj = solve(f.problem.ocp, f.plan, f.traj, preset("msilqr-nonlinear")).trajectory;
  const bool second = state.range(1) == 2;
  const LocalModel local = expand(f.traj, f.problem.ocp,
                                  second ? ExpansionOrder::kSecond : ExpansionOrder::kFirst);
  SweepOptions opts;
  opts.variant = second ? SweepVariant::ms_ddp() : SweepVariant::ms_ilqr();
  opts.regularization = 1e-6;
  for (auto _ : state) benchmark::DoNotOptimize(backward_sweep(local, f.traj, f.plan, opts));
  state.SetLabel(f.problem.name + " " + to_string(opts.variant));
}
BENCHMARK(BM_BackwardSweep)->ArgsProduct({{0, 1, 2}, {1, 2}})->Unit(benchmark::kMillisecond);

void BM_Rollout(benchmark::State& state) {
  const Fixture f(problem_name(static_cast<int>(state.range(0))));
  const LocalModel local = expand(f.traj, f.problem.ocp, ExpansionOrder::kFirst);
  SweepOptions opts;
  opts.variant = SweepVariant::ms_ilqr();
  opts.regularization = 1e4;
  const Policy policy = backward_sweep(local, f.traj, f.plan, opts).policy;
  const bool hybrid = state.range(1) == 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        hybrid ? hybrid_rollout(f.traj, policy, local, f.plan, f.problem.ocp, 0.5)
               : nonlinear_rollout(f.traj, policy, f.problem.ocp, 0.5));
  }
  state.SetLabel(f.problem.name + (hybrid ? " hybrid" : " nonlinear"));
}
BENCHMARK(BM_Rollout)->ArgsProduct({{0, 1, 2}, {0, 1}})->Unit(benchmark::kMicrosecond);

void BM_Solve(benchmark::State& state) {
  const Fixture f(problem_name(static_cast<int>(state.range(0))));
  const SolverConfig config = preset("msilqr-nonlinear");
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve(f.problem.ocp, f.plan, f.problem.initial_guess, config));
  }
  state.SetLabel(f.problem.name);
}
BENCHMARK(BM_Solve)->DenseRange(0, 2)->Unit(benchmark::kMillisecond)->Iterations(1);

}  // namespace

BENCHMARK_MAIN();
