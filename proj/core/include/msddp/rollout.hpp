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
#include <vector>

#include "msddp/backward_sweep.hpp"
#include "msddp/derivatives.hpp"
#include "msddp/ocp.hpp"

namespace msddp {

enum class RolloutKind { kNonlinear, kHybrid };

RolloutKind parse_rollout(std::string_view name);
std::string to_string(RolloutKind kind);

/// Any state component beyond this magnitude aborts a roll-out.
inline constexpr double kDivergenceBound = 1e8;

/// Perturbations of the linearized roll-out; dx[0] = 0.
struct LinearPerturbation {
  std::vector<VectorXd> dx;  // N + 1
  std::vector<VectorXd> du;  // N
};

/// dx_{k+1} = A_k dx_k + B_k du_k + alpha d_{k+1},
/// du_k = alpha k_k + K_k dx_k.
LinearPerturbation linear_rollout(const Trajectory& traj, const Policy& policy,
                                  const LocalModel& local, double alpha);

struct RolloutOptions {
  /// Re-measure the defects of the nonlinear roll-out and check that they
  /// equal (1 - alpha) d to 1e-12 (relative to the state scale).
  bool verify_defects = false;
};

/// Serial simulation of the nonlinear dynamics under the affine policy:
///   u'_k = u_k + alpha k_k + K_k (x'_k - x_k)
///   x'_{k+1} = f(x'_k, u'_k) - (1 - alpha) d_{k+1}.
/// New defects are stored as (1 - alpha) d. Throws DivergenceError.
Trajectory nonlinear_rollout(const Trajectory& traj, const Policy& policy,
                             const OcpDefinition& ocp, double alpha,
                             const RolloutOptions& opts = {});

/// Shooting states move by the linear prediction; each segment is then
/// simulated nonlinearly from its (updated) start and the defects at the
/// shooting nodes are re-measured. Throws DivergenceError.
Trajectory hybrid_rollout(const Trajectory& traj, const Policy& policy, const LocalModel& local,
                          const ShootingPlan& plan, const OcpDefinition& ocp, double alpha);

/// As above, simulating segments in the given order (a permutation of
/// 0..M-1). The result does not depend on the order.
Trajectory hybrid_rollout(const Trajectory& traj, const Policy& policy, const LocalModel& local,
                          const ShootingPlan& plan, const OcpDefinition& ocp, double alpha,
                          const std::vector<int>& segment_order);

}  // namespace msddp
