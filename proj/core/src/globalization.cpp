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

#include "msddp/globalization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace msddp {

MeritMode parse_merit_mode(std::string_view name) {
  if (name == "adaptive") return MeritMode::kAdaptive;
  if (name == "constant") return MeritMode::kConstant;
  if (name == "cost-only") return MeritMode::kCostOnly;
  throw std::invalid_argument("unknown merit mode '" + std::string(name) + "'");
}

std::string to_string(MeritMode mode) {
  switch (mode) {
    case MeritMode::kAdaptive:
      return "adaptive";
    case MeritMode::kConstant:
      return "constant";
    case MeritMode::kCostOnly:
      return "cost-only";
  }
  return "?";
}

double merit(const Trajectory& traj, const OcpDefinition& ocp, double mu, double p) {
  if (mu < 0.0) throw std::invalid_argument("merit weight must be nonnegative");
  const double J = total_cost(traj, ocp);
  return mu == 0.0 ? J : J + mu * total_defect_norm(traj, p);
}

double update_mu(double mu_prev, double expected_change, double defect_norm,
                 const MeritOptions& opts) {
  if (defect_norm <= opts.kappa_d) return mu_prev;
  const double candidate = expected_change / ((1.0 - opts.rho) * defect_norm) + opts.mu0;
  return std::max(mu_prev, candidate);
}

double rounding_slack(double value) {
  return 10.0 * std::numeric_limits<double>::epsilon() * std::abs(value);
}

bool armijo_accept(double merit_new, double merit_old, double expected_change, double alpha,
                   double mu, double defect_norm, double gamma) {
  return merit_new < merit_old + gamma * (expected_change - alpha * mu * defect_norm);
}

bool accept_step(const MeritOptions& opts, double cost_new, double defect_new, double cost_old,
                 double defect_old, double expected_change, double alpha, double mu) {
  if (opts.mode == MeritMode::kCostOnly) {
    const double cost_ref = cost_old + rounding_slack(cost_old);
    if (expected_change <= 0.0) {
      return armijo_accept(cost_new, cost_ref, expected_change, alpha, 0.0, 0.0, opts.gamma);
    }
    // The step is predicted to raise the cost (closing defects); tolerate a
    // realized increase up to a multiple of the prediction.
    return cost_new - cost_ref < opts.increase_factor * expected_change;
  }
  const double merit_new = cost_new + mu * defect_new;
  const double merit_old = cost_old + mu * defect_old;
  return armijo_accept(merit_new, merit_old + rounding_slack(merit_old), expected_change, alpha,
                       mu, defect_old, opts.gamma);
}

LineSearchResult line_search(const LineSearchInput& in, const MeritOptions& opts,
                             RolloutKind rollout) {
  LineSearchResult result;
  result.trajectory = in.nominal;
  result.cost = in.nominal_cost;
  result.defect_norm = in.nominal_defect_norm;
  result.merit = in.nominal_cost + in.mu * in.nominal_defect_norm;

  double alpha = 1.0;
  for (int trial = 0; trial < kLineSearchSteps; ++trial, alpha *= 0.5) {
    result.trials = trial + 1;
    Trajectory candidate;
    double cost = 0.0;
    try {
      candidate = rollout == RolloutKind::kNonlinear
                      ? nonlinear_rollout(in.nominal, in.policy, in.ocp, alpha)
                      : hybrid_rollout(in.nominal, in.policy, in.local, in.plan, in.ocp, alpha);
      cost = total_cost(candidate, in.ocp);
    } catch (const DivergenceError&) {
      continue;
    }
    const double defect = total_defect_norm(candidate, opts.norm_order);
    if (!std::isfinite(defect)) continue;
    if (accept_step(opts, cost, defect, in.nominal_cost, in.nominal_defect_norm, in.ec.at(alpha),
                    alpha, in.mu)) {
      result.trajectory = std::move(candidate);
      result.alpha = alpha;
      result.accepted = true;
      result.cost = cost;
      result.defect_norm = defect;
      result.merit = cost + in.mu * defect;
      return result;
    }
  }
  return result;
}

}  // namespace msddp
