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

#include <stdexcept>

#include "msddp/models.hpp"

namespace msddp {

VectorXd MechanicalModel::config_rate(const VectorXd& /*q*/, const VectorXd& v) const { return v; }

void MechanicalModel::config_rate_jacobians(const VectorXd& q, const VectorXd& v, MatrixXd& dq,
                                            MatrixXd& dv) const {
  dq = MatrixXd::Zero(q.size(), q.size());
  dv = MatrixXd::Identity(q.size(), v.size());
}

VectorXd MechanicalModel::derivative(const VectorXd& x, const VectorXd& u) const {
  const int nq = config_dim();
  const int nv = velocity_dim();
  const VectorXd q = x.head(nq);
  const VectorXd v = x.segment(nq, nv);
  VectorXd xdot(nq + nv);
  xdot.head(nq) = config_rate(q, v);
  xdot.tail(nv) = acceleration(q, v, u);
  return xdot;
}

SemiImplicitEuler::SemiImplicitEuler(std::shared_ptr<const MechanicalModel> model, double dt)
    : model_(std::move(model)), dt_(dt) {
  if (!model_) throw std::invalid_argument("SemiImplicitEuler needs a model");
  if (!(dt_ > 0.0)) throw std::invalid_argument("time step must be positive");
}

VectorXd SemiImplicitEuler::step(const VectorXd& x, const VectorXd& u) const {
  const int nq = model_->config_dim();
  const int nv = model_->velocity_dim();
  if (x.size() != nq + nv || u.size() != model_->control_dim()) {
    throw DimensionError("SemiImplicitEuler::step dimension mismatch");
  }
  const VectorXd q = x.head(nq);
  const VectorXd v = x.tail(nv);
  const VectorXd a = model_->acceleration(q, v, u);
  if (!a.allFinite()) throw DivergenceError("non-finite acceleration", -1);

  VectorXd next(nq + nv);
  next.tail(nv) = v + dt_ * a;
  next.head(nq) = q + dt_ * model_->config_rate(q, next.tail(nv));
  return next;
}

void SemiImplicitEuler::step_jacobians(const VectorXd& x, const VectorXd& u, MatrixXd& A,
                                       MatrixXd& B) const {
  const int nq = model_->config_dim();
  const int nv = model_->velocity_dim();
  const int nu = model_->control_dim();
  const VectorXd q = x.head(nq);
  const VectorXd v = x.tail(nv);
  const AccelerationJacobians da = model_->acceleration_jacobians(q, v, u);
  const VectorXd v_next = v + dt_ * model_->acceleration(q, v, u);

  MatrixXd rate_q;
  MatrixXd rate_v;
  model_->config_rate_jacobians(q, v_next, rate_q, rate_v);

  // Rows of the velocity update.
  const MatrixXd dvn_dq = dt_ * da.dq;
  const MatrixXd dvn_dv = MatrixXd::Identity(nv, nv) + dt_ * da.dv;
  const MatrixXd dvn_du = dt_ * da.du;

  A.resize(nq + nv, nq + nv);
  B.resize(nq + nv, nu);
  A.block(nq, 0, nv, nq) = dvn_dq;
  A.block(nq, nq, nv, nv) = dvn_dv;
  B.bottomRows(nv) = dvn_du;

  A.block(0, 0, nq, nq) = MatrixXd::Identity(nq, nq) + dt_ * (rate_q + rate_v * dvn_dq);
  A.block(0, nq, nq, nv) = dt_ * rate_v * dvn_dv;
  B.topRows(nq) = dt_ * rate_v * dvn_du;
}

LinearDiscreteModel::LinearDiscreteModel(MatrixXd A, MatrixXd B) : A_(std::move(A)), B_(std::move(B)) {
  if (A_.rows() != A_.cols() || B_.rows() != A_.rows()) {
    throw DimensionError("LinearDiscreteModel: A must be square and B must have matching rows");
  }
}

VectorXd LinearDiscreteModel::step(const VectorXd& x, const VectorXd& u) const {
  if (x.size() != A_.rows() || u.size() != B_.cols()) {
    throw DimensionError("LinearDiscreteModel::step dimension mismatch");
  }
  return A_ * x + B_ * u;
}

void LinearDiscreteModel::step_jacobians(const VectorXd& /*x*/, const VectorXd& /*u*/, MatrixXd& A,
                                         MatrixXd& B) const {
  A = A_;
  B = B_;
}

}  // namespace msddp
