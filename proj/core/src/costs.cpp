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

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "msddp/models.hpp"

namespace msddp {

QuadraticCost::QuadraticCost(VectorXd goal, MatrixXd state_weight, MatrixXd control_weight,
                             MatrixXd terminal_weight, VectorXd control_ref, MatrixXd cross_weight)
    : goal_(std::move(goal)),
      control_ref_(std::move(control_ref)),
      state_weight_(std::move(state_weight)),
      control_weight_(std::move(control_weight)),
      terminal_weight_(std::move(terminal_weight)),
      cross_weight_(std::move(cross_weight)) {
  const auto n = goal_.size();
  const auto m = control_weight_.rows();
  if (control_ref_.size() == 0) control_ref_ = VectorXd::Zero(m);
  if (cross_weight_.size() == 0) cross_weight_ = MatrixXd::Zero(m, n);
  if (state_weight_.rows() != n || state_weight_.cols() != n || terminal_weight_.rows() != n ||
      terminal_weight_.cols() != n || control_weight_.cols() != m || control_ref_.size() != m ||
      cross_weight_.rows() != m || cross_weight_.cols() != n) {
    throw DimensionError("QuadraticCost weight dimensions are inconsistent");
  }
}

double QuadraticCost::running(int /*k*/, const VectorXd& x, const VectorXd& u) const {
  const VectorXd dx = x - goal_;
  const VectorXd du = u - control_ref_;
  return dx.dot(state_weight_ * dx) + du.dot(control_weight_ * du) +
         2.0 * du.dot(cross_weight_ * dx);
}

double QuadraticCost::terminal(const VectorXd& x) const {
  const VectorXd dx = x - goal_;
  return dx.dot(terminal_weight_ * dx);
}

CostExpansion QuadraticCost::running_expansion(int k, const VectorXd& x, const VectorXd& u) const {
  const VectorXd dx = x - goal_;
  const VectorXd du = u - control_ref_;
  CostExpansion e;
  e.Q = 2.0 * state_weight_;
  e.R = 2.0 * control_weight_;
  e.P = 2.0 * cross_weight_;
  e.q = e.Q * dx + e.P.transpose() * du;
  e.r = e.R * du + e.P * dx;
  e.value = running(k, x, u);
  return e;
}

TerminalCostExpansion QuadraticCost::terminal_expansion(const VectorXd& x) const {
  TerminalCostExpansion e;
  e.Q = 2.0 * terminal_weight_;
  e.q = e.Q * (x - goal_);
  e.value = terminal(x);
  return e;
}

OcpDefinition random_lq_system(int state_dim, int control_dim, int horizon, std::uint64_t seed,
                               double spectral_radius) {
  if (state_dim < 1 || control_dim < 1 || horizon < 1) {
    throw std::invalid_argument("random_lq_system needs positive dimensions");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto randn = [&](int r, int c) {
    MatrixXd M(r, c);
    for (int j = 0; j < c; ++j)
      for (int i = 0; i < r; ++i) M(i, j) = normal(rng);
    return M;
  };
  const int n = state_dim;
  const int m = control_dim;

  MatrixXd A = randn(n, n);
  if (spectral_radius <= 0.0) {
    A.setZero();
  } else {
    const double radius = A.eigenvalues().cwiseAbs().maxCoeff();
    A *= spectral_radius / radius;
  }
  const MatrixXd B = randn(n, m);

  // Joint running weight [[Wx, Wux'], [Wux, Wu]] positive definite.
  const MatrixXd G = randn(n + m, n + m);
  MatrixXd H = G * G.transpose() / (n + m) + 0.1 * MatrixXd::Identity(n + m, n + m);
  H.bottomRightCorner(m, m) += 0.5 * MatrixXd::Identity(m, m);
  const MatrixXd Gf = randn(n, n);
  const MatrixXd Wf = Gf * Gf.transpose() / n + MatrixXd::Identity(n, n);

  OcpDefinition ocp;
  const VectorXd goal = randn(n, 1);
  ocp.dynamics = std::make_shared<LinearDiscreteModel>(A, B);
  ocp.cost = std::make_shared<QuadraticCost>(goal, H.topLeftCorner(n, n), H.bottomRightCorner(m, m),
                                             Wf, VectorXd::Zero(m), H.bottomLeftCorner(m, n));
  ocp.initial_state = randn(n, 1);
  ocp.horizon = horizon;
  ocp.dt = 1.0;
  return ocp;
}

}  // namespace msddp
