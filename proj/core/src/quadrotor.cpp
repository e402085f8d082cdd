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
#include <limits>
#include <stdexcept>

#include "msddp/models.hpp"

namespace msddp {
namespace {

Eigen::Matrix3d skew(const Eigen::Vector3d& a) {
  Eigen::Matrix3d S;
  S << 0.0, -a.z(), a.y(), a.z(), 0.0, -a.x(), -a.y(), a.x(), 0.0;
  return S;
}

// Third column of R = Rz(yaw) Ry(pitch) Rx(roll), i.e. the body z axis in
// world coordinates, and its partials w.r.t. (roll, pitch, yaw).
struct BodyZ {
  Eigen::Vector3d axis;
  Eigen::Matrix3d d_euler;
};

BodyZ body_z(double roll, double pitch, double yaw) {
  const double cr = std::cos(roll), sr = std::sin(roll);
  const double cp = std::cos(pitch), sp = std::sin(pitch);
  const double cy = std::cos(yaw), sy = std::sin(yaw);
  BodyZ b;
  b.axis << cy * sp * cr + sy * sr, sy * sp * cr - cy * sr, cp * cr;
  b.d_euler.col(0) << -cy * sp * sr + sy * cr, -sy * sp * sr - cy * cr, -cp * sr;
  b.d_euler.col(1) << cy * cp * cr, sy * cp * cr, -sp * cr;
  b.d_euler.col(2) << -sy * sp * cr + cy * sr, cy * sp * cr + sy * sr, 0.0;
  return b;
}

constexpr double kSingularCos = 1e-12;

}  // namespace

void QuadrotorParams::validate() const {
  if (!(mass > 0.0) || !(arm_length > 0.0) || !(inertia_x > 0.0) || !(inertia_y > 0.0) ||
      !(inertia_z > 0.0) || yaw_coefficient < 0.0) {
    throw std::invalid_argument("quadrotor parameters must be positive");
  }
}

QuadrotorParams QuadrotorParams::from_key_values(const KeyValueFile& kv,
                                                 const QuadrotorParams& defaults) {
  kv.require_known({"mass", "arm_length", "yaw_coefficient", "inertia_x", "inertia_y",
                    "inertia_z", "gravity"});
  QuadrotorParams p;
  p.mass = kv.get_double("mass", defaults.mass);
  p.arm_length = kv.get_double("arm_length", defaults.arm_length);
  p.yaw_coefficient = kv.get_double("yaw_coefficient", defaults.yaw_coefficient);
  p.inertia_x = kv.get_double("inertia_x", defaults.inertia_x);
  p.inertia_y = kv.get_double("inertia_y", defaults.inertia_y);
  p.inertia_z = kv.get_double("inertia_z", defaults.inertia_z);
  p.gravity = kv.get_double("gravity", defaults.gravity);
  p.validate();
  return p;
}

Quadrotor::Quadrotor(QuadrotorParams params) : params_(params) { params_.validate(); }

Eigen::Matrix4d Quadrotor::mixer() const {
  const double l = params_.arm_length;
  const double c = params_.yaw_coefficient;
  Eigen::Matrix4d M;
  M << 1.0, 1.0, 1.0, 1.0,  //
      0.0, l, 0.0, -l,      //
      -l, 0.0, l, 0.0,      //
      c, -c, c, -c;
  return M;
}

VectorXd Quadrotor::acceleration(const VectorXd& q, const VectorXd& v, const VectorXd& u) const {
  const Eigen::Vector4d wrench = mixer() * u.head<4>();
  const Eigen::Vector3d omega = v.tail<3>();
  const Eigen::Vector3d inertia(params_.inertia_x, params_.inertia_y, params_.inertia_z);

  VectorXd acc(6);
  const BodyZ b = body_z(q[3], q[4], q[5]);
  acc.head<3>() = wrench[0] / params_.mass * b.axis - Eigen::Vector3d(0.0, 0.0, params_.gravity);
  const Eigen::Vector3d Jw = inertia.cwiseProduct(omega);
  acc.tail<3>() = (wrench.tail<3>() - omega.cross(Jw)).cwiseQuotient(inertia);
  return acc;
}

AccelerationJacobians Quadrotor::acceleration_jacobians(const VectorXd& q, const VectorXd& v,
                                                        const VectorXd& u) const {
  const Eigen::Matrix4d mix = mixer();
  const Eigen::Vector4d wrench = mix * u.head<4>();
  const Eigen::Vector3d omega = v.tail<3>();
  const Eigen::Vector3d inertia(params_.inertia_x, params_.inertia_y, params_.inertia_z);
  const Eigen::Matrix3d J = inertia.asDiagonal();
  const Eigen::Matrix3d Jinv = inertia.cwiseInverse().asDiagonal();
  const BodyZ b = body_z(q[3], q[4], q[5]);

  AccelerationJacobians d;
  d.dq = MatrixXd::Zero(6, 6);
  d.dv = MatrixXd::Zero(6, 6);
  d.du = MatrixXd::Zero(6, 4);

  d.dq.block<3, 3>(0, 3) = wrench[0] / params_.mass * b.d_euler;
  // d(omega x J omega)/d omega = -[J omega]x + [omega]x J
  d.dv.block<3, 3>(3, 3) = -Jinv * (-skew(J * omega) + skew(omega) * J);
  d.du.topRows<3>() = b.axis / params_.mass * Eigen::RowVector4d::Ones();
  d.du.bottomRows<3>() = Jinv * mix.bottomRows<3>();
  return d;
}

VectorXd Quadrotor::config_rate(const VectorXd& q, const VectorXd& v) const {
  const double roll = q[3], pitch = q[4];
  const double cr = std::cos(roll), sr = std::sin(roll);
  const double cp = std::cos(pitch), tp = std::tan(pitch);
  VectorXd rate(6);
  rate.head<3>() = v.head<3>();
  if (std::abs(cp) < kSingularCos) {
    rate.tail<3>().setConstant(std::numeric_limits<double>::quiet_NaN());
    return rate;
  }
  const double p = v[3], qq = v[4], r = v[5];
  rate[3] = p + sr * tp * qq + cr * tp * r;
  rate[4] = cr * qq - sr * r;
  rate[5] = (sr * qq + cr * r) / cp;
  return rate;
}

void Quadrotor::config_rate_jacobians(const VectorXd& q, const VectorXd& v, MatrixXd& dq,
                                      MatrixXd& dv) const {
  const double roll = q[3], pitch = q[4];
  const double cr = std::cos(roll), sr = std::sin(roll);
  const double cp = std::cos(pitch), sp = std::sin(pitch), tp = std::tan(pitch);
  const double qq = v[4], r = v[5];

  dq = MatrixXd::Zero(6, 6);
  dv = MatrixXd::Zero(6, 6);
  dv.topLeftCorner<3, 3>().setIdentity();
  if (std::abs(cp) < kSingularCos) {
    dq.setConstant(std::numeric_limits<double>::quiet_NaN());
    dv.setConstant(std::numeric_limits<double>::quiet_NaN());
    return;
  }
  Eigen::Matrix3d W;
  W << 1.0, sr * tp, cr * tp,  //
      0.0, cr, -sr,            //
      0.0, sr / cp, cr / cp;
  dv.bottomRightCorner<3, 3>() = W;

  const double a = sr * qq + cr * r;  // appears in pitch derivatives
  // column roll
  dq(3, 3) = cr * tp * qq - sr * tp * r;
  dq(4, 3) = -sr * qq - cr * r;
  dq(5, 3) = (cr * qq - sr * r) / cp;
  // column pitch
  dq(3, 4) = a / (cp * cp);
  dq(4, 4) = 0.0;
  dq(5, 4) = a * sp / (cp * cp);
}

}  // namespace msddp
