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

#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace msddp {

using Eigen::MatrixXd;
using Eigen::VectorXd;

class DiscreteModel;
class CostModel;

/// Thrown when vectors handed to the library do not match the problem dimensions.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a simulation or cost evaluation produces NaN/Inf or leaves the
/// divergence guard. `node` is the time index where it was detected.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, int node)
      : std::runtime_error(what), node_(node) {}
  int node() const { return node_; }

 private:
  int node_;
};

/// Iterate of the multiple-shooting problem.
///
/// `defects[k]` holds d_{k+1} = f(x_k, u_k) - x_{k+1}, the mismatch produced
/// by the step that starts at node k. Roll-out nodes always carry an exact
/// zero.
struct Trajectory {
  std::vector<VectorXd> states;    // N + 1
  std::vector<VectorXd> controls;  // N
  std::vector<VectorXd> defects;   // N

  Trajectory() = default;
  Trajectory(int horizon, int state_dim, int control_dim);

  int horizon() const { return static_cast<int>(controls.size()); }
  int state_dim() const { return states.empty() ? 0 : static_cast<int>(states.front().size()); }
  int control_dim() const { return controls.empty() ? 0 : static_cast<int>(controls.front().size()); }

  /// Throws DimensionError unless the sequence lengths and vector sizes agree.
  void check_dimensions(int horizon, int state_dim, int control_dim) const;
  bool all_finite() const;
};

/// Partition of the nodes 1..N-1 into shooting nodes (free decision
/// variables) and roll-out nodes (overwritten by simulation). Node 0 and node
/// N are never shooting nodes.
class ShootingPlan {
 public:
  /// Single shooting: no shooting nodes, one segment.
  static ShootingPlan single(int horizon);
  /// Every interior node is a shooting node (one segment per time step).
  static ShootingPlan every_node(int horizon);
  /// Shooting nodes at {m, 2m, ..., (M-1)m} with m = (N-1)/M. Requires
  /// M | (N-1). As a convenience `segments == horizon` yields every_node().
  static ShootingPlan even(int horizon, int segments);
  /// Arbitrary index set; indices must lie in [1, N-1].
  static ShootingPlan from_indices(int horizon, std::vector<int> indices);

  int horizon() const { return horizon_; }
  int segment_count() const { return static_cast<int>(indices_.size()) + 1; }
  const std::vector<int>& shooting_indices() const { return indices_; }
  bool is_shooting(int node) const { return node >= 0 && node <= horizon_ && mask_[node]; }
  bool is_single_shooting() const { return indices_.empty(); }

  /// Segment start nodes: 0 followed by the shooting indices.
  std::vector<int> segment_starts() const;

 private:
  ShootingPlan(int horizon, std::vector<int> indices);

  int horizon_ = 0;
  std::vector<int> indices_;
  std::vector<bool> mask_;
};

/// Discrete multiple-shooting optimal control problem.
struct OcpDefinition {
  std::shared_ptr<const DiscreteModel> dynamics;
  std::shared_ptr<const CostModel> cost;
  VectorXd initial_state;
  int horizon = 0;
  double dt = 0.0;

  int state_dim() const;
  int control_dim() const;
  /// Throws std::invalid_argument / DimensionError on an inconsistent definition.
  void validate() const;
};

/// Quadratic expansion of the stage cost at one node.
struct CostExpansion {
  VectorXd q;  // d l / dx
  VectorXd r;  // d l / du
  MatrixXd Q;  // d2 l / dx2
  MatrixXd R;  // d2 l / du2
  MatrixXd P;  // d2 l / du dx  (m x n)
  double value = 0.0;
};

struct TerminalCostExpansion {
  VectorXd q;
  MatrixXd Q;
  double value = 0.0;
};

/// Second-order partials of the discrete step. Entry i of each vector is the
/// Hessian block of output component f_i.
struct DynamicsTensors {
  std::vector<MatrixXd> xx;  // n entries, each n x n
  std::vector<MatrixXd> uu;  // n entries, each m x m
  std::vector<MatrixXd> ux;  // n entries, each m x n
};

struct DynamicsExpansion {
  MatrixXd A;
  MatrixXd B;
  std::optional<DynamicsTensors> tensors;
};

/// Re-simulates roll-out nodes and measures defects at shooting nodes.
/// Node 0 is set to the problem's initial state.
///
/// For k+1 not in the plan, states[k+1] is overwritten by f(x_k, u_k) and
/// its defect set to zero; at shooting nodes the state is kept and
/// d_{k+1} = f(x_k, u_k) - x_{k+1} recorded.
Trajectory measure_defects(const Trajectory& traj, const ShootingPlan& plan,
                           const OcpDefinition& ocp);

/// p-norm of the stacked defect vector. `p` may be +infinity.
double total_defect_norm(const Trajectory& traj, double p = 2.0);

/// J(X, U) on the stored states; throws DivergenceError on a non-finite value.
double total_cost(const Trajectory& traj, const OcpDefinition& ocp);

/// Rows `k, x_0.., u_0.., d_0..`; the terminal row leaves control and defect
/// cells empty.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

/// Lower-level CSV helper shared by all writers: "%.12e".
std::string format_number(double value);

}  // namespace msddp
