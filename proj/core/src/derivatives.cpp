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

#include "msddp/derivatives.hpp"

#include <stdexcept>

namespace msddp {

void fd_jacobians(const DiscreteModel& model, const VectorXd& x, const VectorXd& u, double h,
                  MatrixXd& A, MatrixXd& B) {
  if (!(h > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
  const int n = model.state_dim();
  const int m = model.control_dim();
  A.resize(n, n);
  B.resize(n, m);
  for (int j = 0; j < n; ++j) {
    VectorXd xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    A.col(j) = (model.step(xp, u) - model.step(xm, u)) / (2.0 * h);
  }
  for (int j = 0; j < m; ++j) {
    VectorXd up = u, um = u;
    up[j] += h;
    um[j] -= h;
    B.col(j) = (model.step(x, up) - model.step(x, um)) / (2.0 * h);
  }
}

DynamicsTensors dynamics_tensors(const DiscreteModel& model, const VectorXd& x, const VectorXd& u,
                                 double h) {
  const int n = model.state_dim();
  const int m = model.control_dim();
  DynamicsTensors t;
  t.xx.assign(n, MatrixXd::Zero(n, n));
  t.uu.assign(n, MatrixXd::Zero(m, m));
  t.ux.assign(n, MatrixXd::Zero(m, n));

  MatrixXd Ap, Bp, Am, Bm;
  // Perturb x_b: column b of d(A)/dx_b gives f_xx[i](a, b); d(B)/dx_b gives f_ux[i](a, b).
  for (int b = 0; b < n; ++b) {
    VectorXd xp = x, xm = x;
    xp[b] += h;
    xm[b] -= h;
    model.step_jacobians(xp, u, Ap, Bp);
    model.step_jacobians(xm, u, Am, Bm);
    const MatrixXd dA = (Ap - Am) / (2.0 * h);
    const MatrixXd dB = (Bp - Bm) / (2.0 * h);
    for (int i = 0; i < n; ++i) {
      t.xx[i].col(b) = dA.row(i).transpose();
      t.ux[i].col(b) = dB.row(i).transpose();
    }
  }
  for (int b = 0; b < m; ++b) {
    VectorXd up = u, um = u;
    up[b] += h;
    um[b] -= h;
    model.step_jacobians(x, up, Ap, Bp);
    model.step_jacobians(x, um, Am, Bm);
    const MatrixXd dB = (Bp - Bm) / (2.0 * h);
    for (int i = 0; i < n; ++i) t.uu[i].col(b) = dB.row(i).transpose();
  }
  return t;
}

MatrixXd contract(const VectorXd& s, const std::vector<MatrixXd>& tensor) {
  if (tensor.empty()) return {};
  MatrixXd out = MatrixXd::Zero(tensor.front().rows(), tensor.front().cols());
  for (std::size_t i = 0; i < tensor.size(); ++i) out += s[static_cast<Eigen::Index>(i)] * tensor[i];
  return out;
}

LocalModel expand(const Trajectory& traj, const OcpDefinition& ocp, ExpansionOrder order,
                  double tensor_step) {
  const int N = ocp.horizon;
  traj.check_dimensions(N, ocp.state_dim(), ocp.control_dim());

  LocalModel local;
  local.cost.resize(N);
  local.dynamics.resize(N);
  for (int k = 0; k < N; ++k) {
    const VectorXd& x = traj.states[k];
    const VectorXd& u = traj.controls[k];
    local.cost[k] = ocp.cost->running_expansion(k, x, u);
    DynamicsExpansion& dyn = local.dynamics[k];
    ocp.dynamics->step_jacobians(x, u, dyn.A, dyn.B);
    if (order == ExpansionOrder::kSecond) {
      dyn.tensors = dynamics_tensors(*ocp.dynamics, x, u, tensor_step);
    }
    if (!dyn.A.allFinite() || !dyn.B.allFinite()) {
      throw DivergenceError("non-finite dynamics derivative at node " + std::to_string(k), k);
    }
  }
  local.terminal = ocp.cost->terminal_expansion(traj.states[N]);
  return local;
}

}  // namespace msddp
