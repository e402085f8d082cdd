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

#include <vector>

#include "msddp/models.hpp"
#include "msddp/ocp.hpp"

namespace msddp {

enum class ExpansionOrder { kFirst = 1, kSecond = 2 };

/// Cost and dynamics expansion at node k = 0..N-1, plus the terminal cost.
struct LocalModel {
  std::vector<CostExpansion> cost;
  std::vector<DynamicsExpansion> dynamics;
  TerminalCostExpansion terminal;

  int horizon() const { return static_cast<int>(dynamics.size()); }
  bool has_tensors() const { return !dynamics.empty() && dynamics.front().tensors.has_value(); }
};

/// Default step for finite-differencing analytic Jacobians into tensors.
inline constexpr double kDefaultTensorStep = 1e-5;

/// Expands cost and dynamics along `traj`. A and B are the model's analytic
/// Jacobians; with ExpansionOrder::kSecond the tensors are central
/// differences of those Jacobians with step `tensor_step`.
LocalModel expand(const Trajectory& traj, const OcpDefinition& ocp, ExpansionOrder order,
                  double tensor_step = kDefaultTensorStep);

/// Second-order tensors of the discrete step at (x, u).
DynamicsTensors dynamics_tensors(const DiscreteModel& model, const VectorXd& x, const VectorXd& u,
                                 double h = kDefaultTensorStep);

/// Central-difference Jacobians of the discrete step; verification oracle.
void fd_jacobians(const DiscreteModel& model, const VectorXd& x, const VectorXd& u, double h,
                  MatrixXd& A, MatrixXd& B);

/// s . T  =  sum_i s_i T[i].
MatrixXd contract(const VectorXd& s, const std::vector<MatrixXd>& tensor);

}  // namespace msddp
