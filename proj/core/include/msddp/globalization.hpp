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

#include <string>
#include <string_view>

#include "msddp/backward_sweep.hpp"
#include "msddp/rollout.hpp"

namespace msddp {

enum class MeritMode {
  kAdaptive,  // mu updated from the expected cost change each iteration
  kConstant,  // fixed mu
  kCostOnly,  // defects ignored by the acceptance test
};

MeritMode parse_merit_mode(std::string_view name);
std::string to_string(MeritMode mode);

struct MeritOptions {
  MeritMode mode = MeritMode::kAdaptive;
  double norm_order = 2.0;  // p
  double rho = 0.5;
  double mu0 = 10.0;
  double kappa_d = 1e-4;
  double gamma = 0.1;         // Armijo fraction
  double mu_constant = 100.0;  // used by kConstant
  /// Cost-only mode, expected cost *increase*: accept when the realized
  /// increase stays below this multiple of the prediction.
  double increase_factor = 2.0;
};

/// J + mu * ||d||_p.
double merit(const Trajectory& traj, const OcpDefinition& ocp, double mu, double p);

/// Adaptive weight: when ||d|| > kappa_d,
///   mu = max(mu_prev, EC(1) / ((1 - rho) ||d||) + mu0),
/// otherwise mu_prev.
double update_mu(double mu_prev, double expected_change, double defect_norm,
                 const MeritOptions& opts);

/// merit_new < merit_old + gamma (EC(alpha) - alpha mu ||d||).
bool armijo_accept(double merit_new, double merit_old, double expected_change, double alpha,
                   double mu, double defect_norm, double gamma);

/// Halving schedule 1, 1/2, ..., 2^-10.
inline constexpr int kLineSearchSteps = 11;

struct LineSearchResult {
  Trajectory trajectory;
  double alpha = 0.0;
  bool accepted = false;
  double cost = 0.0;
  double defect_norm = 0.0;
  double merit = 0.0;
  int trials = 0;
};

/// Everything a line search needs about the current iterate.
struct LineSearchInput {
  const Trajectory& nominal;
  const Policy& policy;
  const LocalModel& local;
  const ShootingPlan& plan;
  const OcpDefinition& ocp;
  ExpectedCostCoefficients ec;
  double mu = 0.0;
  double nominal_cost = 0.0;
  double nominal_defect_norm = 0.0;
};

/// Backtracking over the halving schedule; the first candidate passing the
/// acceptance test is returned. Diverged roll-outs count as rejections.
/// On failure the nominal trajectory is returned with alpha = 0.
LineSearchResult line_search(const LineSearchInput& in, const MeritOptions& opts,
                             RolloutKind rollout);

/// Relaxation of the acceptance reference, 10 eps |value|, so that steps whose
/// effect lies below the rounding of the merit are not rejected.
double rounding_slack(double value);

/// Acceptance test for one candidate, dispatching on the merit mode. The
/// reference merit (or cost) is relaxed by rounding_slack.
bool accept_step(const MeritOptions& opts, double cost_new, double defect_new, double cost_old,
                 double defect_old, double expected_change, double alpha, double mu);

}  // namespace msddp
