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

#include "msddp/ocp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "msddp/models.hpp"

namespace msddp {

Trajectory::Trajectory(int horizon, int state_dim, int control_dim)
    : states(horizon + 1, VectorXd::Zero(state_dim)),
      controls(horizon, VectorXd::Zero(control_dim)),
      defects(horizon, VectorXd::Zero(state_dim)) {}

void Trajectory::check_dimensions(int horizon, int state_dim, int control_dim) const {
  if (static_cast<int>(states.size()) != horizon + 1 ||
      static_cast<int>(controls.size()) != horizon ||
      static_cast<int>(defects.size()) != horizon) {
    throw DimensionError("trajectory length does not match horizon " + std::to_string(horizon));
  }
  for (const auto& x : states) {
    if (x.size() != state_dim) throw DimensionError("state dimension mismatch");
  }
  for (const auto& d : defects) {
    if (d.size() != state_dim) throw DimensionError("defect dimension mismatch");
  }
  for (const auto& u : controls) {
    if (u.size() != control_dim) throw DimensionError("control dimension mismatch");
  }
}

bool Trajectory::all_finite() const {
  auto finite = [](const VectorXd& v) { return v.allFinite(); };
  return std::all_of(states.begin(), states.end(), finite) &&
         std::all_of(controls.begin(), controls.end(), finite) &&
         std::all_of(defects.begin(), defects.end(), finite);
}

// ---------------------------------------------------------------------------

ShootingPlan::ShootingPlan(int horizon, std::vector<int> indices)
    : horizon_(horizon), indices_(std::move(indices)), mask_(horizon + 1, false) {
  if (horizon < 1) throw std::invalid_argument("horizon must be positive");
  std::sort(indices_.begin(), indices_.end());
  indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
  for (int j : indices_) {
    if (j < 1 || j > horizon - 1) {
      throw std::invalid_argument("shooting index " + std::to_string(j) +
                                  " outside [1, N-1]");
    }
    mask_[j] = true;
  }
}

ShootingPlan ShootingPlan::single(int horizon) { return ShootingPlan(horizon, {}); }

ShootingPlan ShootingPlan::every_node(int horizon) {
  std::vector<int> idx;
  for (int j = 1; j < horizon; ++j) idx.push_back(j);
  return ShootingPlan(horizon, std::move(idx));
}

ShootingPlan ShootingPlan::even(int horizon, int segments) {
  if (segments < 1) throw std::invalid_argument("segment count must be positive");
  if (segments == horizon) return every_node(horizon);
  if (segments == 1) return single(horizon);
  if ((horizon - 1) % segments != 0) {
    throw std::invalid_argument("segment count " + std::to_string(segments) +
                                " does not divide N-1 = " + std::to_string(horizon - 1));
  }
  const int m = (horizon - 1) / segments;
  std::vector<int> idx;
  for (int j = 1; j < segments; ++j) idx.push_back(j * m);
  return ShootingPlan(horizon, std::move(idx));
}

ShootingPlan ShootingPlan::from_indices(int horizon, std::vector<int> indices) {
  return ShootingPlan(horizon, std::move(indices));
}

std::vector<int> ShootingPlan::segment_starts() const {
  std::vector<int> starts{0};
  starts.insert(starts.end(), indices_.begin(), indices_.end());
  return starts;
}

// ---------------------------------------------------------------------------

int OcpDefinition::state_dim() const { return dynamics ? dynamics->state_dim() : 0; }
int OcpDefinition::control_dim() const { return dynamics ? dynamics->control_dim() : 0; }

void OcpDefinition::validate() const {
  if (!dynamics) throw std::invalid_argument("OCP has no dynamics model");
  if (!cost) throw std::invalid_argument("OCP has no cost model");
  if (horizon < 1) throw std::invalid_argument("OCP horizon must be positive");
  if (!(dt > 0.0)) throw std::invalid_argument("OCP time step must be positive");
  if (initial_state.size() != dynamics->state_dim()) {
    throw DimensionError("initial state dimension does not match the dynamics model");
  }
}

Trajectory measure_defects(const Trajectory& traj, const ShootingPlan& plan,
                           const OcpDefinition& ocp) {
  traj.check_dimensions(ocp.horizon, ocp.state_dim(), ocp.control_dim());
  if (plan.horizon() != ocp.horizon) throw DimensionError("plan horizon does not match OCP");

  Trajectory out = traj;
  out.states[0] = ocp.initial_state;
  for (int k = 0; k < ocp.horizon; ++k) {
    VectorXd next = ocp.dynamics->step(out.states[k], out.controls[k]);
    if (!next.allFinite()) {
      throw DivergenceError("non-finite state while simulating node " + std::to_string(k + 1),
                            k + 1);
    }
    if (plan.is_shooting(k + 1)) {
      out.defects[k] = next - out.states[k + 1];
    } else {
      out.states[k + 1] = std::move(next);
      out.defects[k].setZero();
    }
  }
  return out;
}

double total_defect_norm(const Trajectory& traj, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (const auto& d : traj.defects) m = std::max(m, d.cwiseAbs().maxCoeff());
    return m;
  }
  if (p == 2.0) {
    double acc = 0.0;
    for (const auto& d : traj.defects) acc += d.squaredNorm();
    return std::sqrt(acc);
  }
  if (p == 1.0) {
    double acc = 0.0;
    for (const auto& d : traj.defects) acc += d.lpNorm<1>();
    return acc;
  }
  double acc = 0.0;
  for (const auto& d : traj.defects) acc += d.cwiseAbs().array().pow(p).sum();
  return std::pow(acc, 1.0 / p);
}

double total_cost(const Trajectory& traj, const OcpDefinition& ocp) {
  double J = 0.0;
  for (int k = 0; k < traj.horizon(); ++k) {
    J += ocp.cost->running(k, traj.states[k], traj.controls[k]);
  }
  J += ocp.cost->terminal(traj.states.back());
  if (!std::isfinite(J)) throw DivergenceError("non-finite cost", traj.horizon());
  return J;
}

std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12e", value);
  return buf;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  const int n = traj.state_dim();
  const int m = traj.control_dim();
  out << "k";
  for (int i = 0; i < n; ++i) out << ",x_" << i;
  for (int i = 0; i < m; ++i) out << ",u_" << i;
  for (int i = 0; i < n; ++i) out << ",d_" << i;
  out << '\n';
  for (int k = 0; k <= traj.horizon(); ++k) {
    out << k;
    for (int i = 0; i < n; ++i) out << ',' << format_number(traj.states[k][i]);
    const bool terminal = k == traj.horizon();
    for (int i = 0; i < m; ++i) {
      out << ',';
      if (!terminal) out << format_number(traj.controls[k][i]);
    }
    for (int i = 0; i < n; ++i) {
      out << ',';
      if (!terminal) out << format_number(traj.defects[k][i]);
    }
    out << '\n';
  }
}

}  // namespace msddp
