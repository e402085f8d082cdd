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

#include "msddp/rollout.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "msddp/models.hpp"

namespace msddp {

RolloutKind parse_rollout(std::string_view name) {
  if (name == "nonlinear") return RolloutKind::kNonlinear;
  if (name == "hybrid") return RolloutKind::kHybrid;
  throw std::invalid_argument("unknown roll-out kind '" + std::string(name) + "'");
}

std::string to_string(RolloutKind kind) {
  return kind == RolloutKind::kNonlinear ? "nonlinear" : "hybrid";
}

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("step size must lie in (0, 1]");
}

void guard(const VectorXd& x, int node) {
  if (!x.allFinite() || x.cwiseAbs().maxCoeff() > kDivergenceBound) {
    throw DivergenceError("roll-out diverged at node " + std::to_string(node), node);
  }
}

VectorXd policy_control(const Trajectory& nominal, const Policy& policy, int k, double alpha,
                        const VectorXd& x_new) {
  return nominal.controls[k] + alpha * policy.feedforward[k] +
         policy.gain[k] * (x_new - nominal.states[k]);
}

VectorXd simulate(const OcpDefinition& ocp, const VectorXd& x, const VectorXd& u, int node) {
  try {
    return ocp.dynamics->step(x, u);
  } catch (const DivergenceError&) {
    throw DivergenceError("roll-out diverged at node " + std::to_string(node), node);
  }
}

}  // namespace

LinearPerturbation linear_rollout(const Trajectory& traj, const Policy& policy,
                                  const LocalModel& local, double alpha) {
  const int N = local.horizon();
  if (policy.horizon() != N || traj.horizon() != N) {
    throw DimensionError("linear_rollout: horizon mismatch");
  }
  LinearPerturbation p;
  p.dx.resize(N + 1);
  p.du.resize(N);
  p.dx[0] = VectorXd::Zero(traj.state_dim());
  for (int k = 0; k < N; ++k) {
    p.du[k] = alpha * policy.feedforward[k] + policy.gain[k] * p.dx[k];
    p.dx[k + 1] = local.dynamics[k].A * p.dx[k] + local.dynamics[k].B * p.du[k] +
                  alpha * traj.defects[k];
  }
  return p;
}

Trajectory nonlinear_rollout(const Trajectory& traj, const Policy& policy,
                             const OcpDefinition& ocp, double alpha, const RolloutOptions& opts) {
  check_alpha(alpha);
  const int N = ocp.horizon;
  if (policy.horizon() != N || traj.horizon() != N) {
    throw DimensionError("nonlinear_rollout: horizon mismatch");
  }
  const double shrink = 1.0 - alpha;

  Trajectory out = traj;
  out.states[0] = traj.states[0];
  for (int k = 0; k < N; ++k) {
    out.controls[k] = policy_control(traj, policy, k, alpha, out.states[k]);
    const VectorXd next = simulate(ocp, out.states[k], out.controls[k], k + 1);
    out.defects[k] = shrink * traj.defects[k];
    out.states[k + 1] = next - out.defects[k];
    guard(out.states[k + 1], k + 1);

    if (opts.verify_defects) {
      const VectorXd measured = next - out.states[k + 1];
      const double scale = std::max(1.0, next.cwiseAbs().maxCoeff());
      if ((measured - out.defects[k]).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw std::logic_error("nonlinear roll-out defect bookkeeping mismatch at node " +
                               std::to_string(k + 1));
      }
    }
  }
  return out;
}

Trajectory hybrid_rollout(const Trajectory& traj, const Policy& policy, const LocalModel& local,
                          const ShootingPlan& plan, const OcpDefinition& ocp, double alpha) {
  std::vector<int> order(plan.segment_count());
  std::iota(order.begin(), order.end(), 0);
  return hybrid_rollout(traj, policy, local, plan, ocp, alpha, order);
}

Trajectory hybrid_rollout(const Trajectory& traj, const Policy& policy, const LocalModel& local,
                          const ShootingPlan& plan, const OcpDefinition& ocp, double alpha,
                          const std::vector<int>& segment_order) {
  check_alpha(alpha);
  const int N = ocp.horizon;
  if (policy.horizon() != N || traj.horizon() != N || plan.horizon() != N) {
    throw DimensionError("hybrid_rollout: horizon mismatch");
  }
  const std::vector<int> starts = plan.segment_starts();
  if (segment_order.size() != starts.size()) {
    throw std::invalid_argument("segment order must list every segment once");
  }

  Trajectory out = traj;
  if (!plan.is_single_shooting()) {
    const LinearPerturbation p = linear_rollout(traj, policy, local, alpha);
    for (int j : plan.shooting_indices()) {
      out.states[j] = traj.states[j] + p.dx[j];
      guard(out.states[j], j);
    }
  }

  std::vector<bool> done(starts.size(), false);
  for (int seg : segment_order) {
    if (seg < 0 || seg >= static_cast<int>(starts.size()) || done[seg]) {
      throw std::invalid_argument("segment order must be a permutation");
    }
    done[seg] = true;
    const int begin = starts[seg];
    const int end = seg + 1 < static_cast<int>(starts.size()) ? starts[seg + 1] : N;
    for (int k = begin; k < end; ++k) {
      out.controls[k] = policy_control(traj, policy, k, alpha, out.states[k]);
      VectorXd next = simulate(ocp, out.states[k], out.controls[k], k + 1);
      guard(next, k + 1);
      if (plan.is_shooting(k + 1)) {
        out.defects[k] = next - out.states[k + 1];
      } else {
        out.states[k + 1] = std::move(next);
        out.defects[k].setZero();
      }
    }
  }
  return out;
}

}  // namespace msddp
