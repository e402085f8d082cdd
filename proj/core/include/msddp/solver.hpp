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

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "msddp/backward_sweep.hpp"
#include "msddp/globalization.hpp"
#include "msddp/key_value.hpp"
#include "msddp/rollout.hpp"

namespace msddp {

/// Which prediction feeds the merit update and the acceptance test.
enum class ExpectationModel {
  kExact,        // cost change along the linear roll-out, defects included
  kApproximate,  // feedforward-only model accumulated by the backward sweep
};

ExpectationModel parse_expectation(std::string_view name);
std::string to_string(ExpectationModel model);

struct RegularizationSchedule {
  double initial = 0.0;
  double min = 1e-9;
  double factor = 10.0;
  double max = 1e10;
  /// Floor applied after a failed line search.
  double line_search_floor = 1e-6;
  /// Accepted steps shorter than this count as poor progress and raise
  /// lambda; steps at least `decrease_step` long lower it.
  double increase_step = 0.01;
  double decrease_step = 0.5;
};

struct SolverConfig {
  SweepVariant variant = SweepVariant::ms_ddp();
  RolloutKind rollout = RolloutKind::kNonlinear;
  MeritOptions merit;
  ExpectationModel expectation = ExpectationModel::kExact;
  /// Scalar penalty weight q_d; the sweep uses Q_d = q_d I. Zero disables.
  double penalty = 0.0;
  RegularizationSchedule regularization;
  int max_iterations = 200;
  double cost_tol = 1e-8;
  double defect_tol = 1e-3;
  /// Stop without a line search once ||k||_inf falls below this and the
  /// defect tolerance holds.
  double feedforward_tol = 1e-10;
  double tensor_step = kDefaultTensorStep;

  void validate() const;
};

/// Keys accepted by config files (see README).
const std::set<std::string>& solver_config_keys();

/// Applies `kv` on top of `base`. Throws ConfigError naming the bad key.
SolverConfig solver_config_from(const KeyValueFile& kv, SolverConfig base = {});

/// Named configurations of the unified framework (e.g. "msddp-nonlinear",
/// "msilqr-exact", "filqr"). Throws ConfigError for unknown names.
SolverConfig preset(std::string_view name);
std::vector<std::string> preset_names();

struct IterationRecord {
  int iteration = 0;
  double cost = 0.0;
  double defect = 0.0;
  double merit = 0.0;
  double mu = 0.0;
  double alpha = 0.0;
  double lambda = 0.0;
  double ec1 = 0.0;
  double ec2 = 0.0;
  double wall_ms = 0.0;
};

enum class SolveStatus { kConverged, kStalled, kMaxIterations, kStopped };

std::string to_string(SolveStatus status);

struct SolveResult {
  Trajectory trajectory;
  /// Row 0 describes the initial iterate; rows 1.. one per outer iteration,
  /// rejected iterations carry alpha = 0.
  std::vector<IterationRecord> history;
  SolveStatus status = SolveStatus::kMaxIterations;
  /// Outer iterations performed (accepted and rejected).
  int iterations = 0;
  int accepted_iterations = 0;
  double cost = 0.0;
  double defect = 0.0;
};

/// Called with every accepted iterate (and once with the normalized initial
/// trajectory as iteration 0). Returning false stops the solve.
using IterateObserver = std::function<bool(int iteration, const Trajectory&)>;

/// Outer loop: expand, sweep (raising regularization on factorization
/// failure), expected cost change, merit update, line search, convergence
/// check. The initial guess is normalized with measure_defects first.
SolveResult solve(const OcpDefinition& ocp, const ShootingPlan& plan, const Trajectory& initial,
                  const SolverConfig& config, const IterateObserver& observer = {});

/// `iter,cost,defect,merit,mu,alpha,lambda,ec1,ec2,wall_ms`
void write_history_csv(std::ostream& out, const std::vector<IterationRecord>& history);

// ---------------------------------------------------------------------------
// Local convergence rate

struct RateFit {
  int sample = 0;
  bool usable = false;
  double kappa = 0.0;
  double epsilon = 0.0;
  int points = 0;  // iterates with error inside the fit window
  std::vector<double> errors;
};

struct RateOptions {
  int samples = 100;
  double radius = 1e-2;
  std::uint64_t seed = 1;
  double fit_low = 1e-11;
  double fit_high = 1e-2;
  int max_iterations = 40;
};

/// ||(X - X*, U - U*)||_2 over all stacked states and controls.
double iterate_error(const Trajectory& traj, const Trajectory& optimum);

/// Least-squares fit of log e_{j+1} = log kappa + epsilon log e_j over
/// consecutive iterate pairs whose errors both lie in (fit_low, fit_high).
/// Unusable when fewer than three iterates fall in the window.
RateFit fit_rate(const std::vector<double>& errors, double fit_low, double fit_high);

/// Draws the stacked shooting states of `optimum` uniformly from the 2-norm
/// ball of `radius` (controls kept), solves with `config`, and fits the local
/// rate per sample.
std::vector<RateFit> measure_local_rate(const OcpDefinition& ocp, const ShootingPlan& plan,
                                        const Trajectory& optimum, const RateOptions& opts,
                                        const SolverConfig& config);

}  // namespace msddp
