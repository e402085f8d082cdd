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

#include <cstdint>
#include <memory>

#include "msddp/key_value.hpp"
#include "msddp/ocp.hpp"

namespace msddp {

/// Discrete-time map x_{k+1} = f(x_k, u_k) with analytic first derivatives.
class DiscreteModel {
 public:
  virtual ~DiscreteModel() = default;

  virtual int state_dim() const = 0;
  virtual int control_dim() const = 0;
  virtual VectorXd step(const VectorXd& x, const VectorXd& u) const = 0;
  /// A = df/dx (n x n), B = df/du (n x m).
  virtual void step_jacobians(const VectorXd& x, const VectorXd& u, MatrixXd& A,
                              MatrixXd& B) const = 0;
};

/// Partials of the acceleration a(q, v, u).
struct AccelerationJacobians {
  MatrixXd dq;
  MatrixXd dv;
  MatrixXd du;
};

/// Continuous second-order model with state x = (q, v): configuration q and
/// velocity v. The configuration rate defaults to q_dot = v; models with a
/// non-trivial kinematic map (Euler-angle attitude) override it.
class MechanicalModel {
 public:
  virtual ~MechanicalModel() = default;

  virtual int config_dim() const = 0;
  virtual int velocity_dim() const = 0;
  virtual int control_dim() const = 0;
  int state_dim() const { return config_dim() + velocity_dim(); }

  virtual VectorXd acceleration(const VectorXd& q, const VectorXd& v, const VectorXd& u) const = 0;
  virtual AccelerationJacobians acceleration_jacobians(const VectorXd& q, const VectorXd& v,
                                                       const VectorXd& u) const = 0;

  virtual VectorXd config_rate(const VectorXd& q, const VectorXd& v) const;
  /// d(config_rate)/dq and d(config_rate)/dv.
  virtual void config_rate_jacobians(const VectorXd& q, const VectorXd& v, MatrixXd& dq,
                                     MatrixXd& dv) const;

  /// x_dot = f_c(x, u).
  VectorXd derivative(const VectorXd& x, const VectorXd& u) const;
};

/// Semi-implicit (symplectic) Euler discretization:
///   v' = v + dt a(q, v, u),  q' = q + dt qdot(q, v').
class SemiImplicitEuler final : public DiscreteModel {
 public:
  SemiImplicitEuler(std::shared_ptr<const MechanicalModel> model, double dt);

  int state_dim() const override { return model_->state_dim(); }
  int control_dim() const override { return model_->control_dim(); }
  VectorXd step(const VectorXd& x, const VectorXd& u) const override;
  void step_jacobians(const VectorXd& x, const VectorXd& u, MatrixXd& A,
                      MatrixXd& B) const override;

  const MechanicalModel& continuous() const { return *model_; }
  double dt() const { return dt_; }

 private:
  std::shared_ptr<const MechanicalModel> model_;
  double dt_;
};

/// Exact linear map x' = A x + B u.
class LinearDiscreteModel final : public DiscreteModel {
 public:
  LinearDiscreteModel(MatrixXd A, MatrixXd B);

  int state_dim() const override { return static_cast<int>(A_.rows()); }
  int control_dim() const override { return static_cast<int>(B_.cols()); }
  VectorXd step(const VectorXd& x, const VectorXd& u) const override;
  void step_jacobians(const VectorXd& x, const VectorXd& u, MatrixXd& A,
                      MatrixXd& B) const override;

  const MatrixXd& A() const { return A_; }
  const MatrixXd& B() const { return B_; }

 private:
  MatrixXd A_;
  MatrixXd B_;
};

// ---------------------------------------------------------------------------
// Benchmark mechanical models

/// Parameters of a planar serial chain. Link i has mass `mass[i]`, length
/// `length[i]`, centre of mass at `com[i]` from its proximal joint and
/// rotational inertia `inertia[i]` about that centre of mass. Angles are
/// measured from the downward vertical.
struct ChainParams {
  std::vector<double> mass;
  std::vector<double> length;
  std::vector<double> com;
  std::vector<double> inertia;
  double gravity = 9.81;

  int links() const { return static_cast<int>(mass.size()); }
  void validate() const;

  /// Unit point masses at the tips of unit-length links.
  static ChainParams point_masses(int links);
  /// Keys: `links`, `mass`, `length`, `com`, `inertia` (lists or scalars
  /// broadcast to every link), `gravity`.
  static ChainParams from_key_values(const KeyValueFile& kv, const ChainParams& defaults);
};

/// Two-link underactuated pendulum; only the elbow joint is actuated.
/// State (theta1, theta2, theta1_dot, theta2_dot).
class Acrobot final : public MechanicalModel {
 public:
  explicit Acrobot(ChainParams params = ChainParams::point_masses(2));

  int config_dim() const override { return 2; }
  int velocity_dim() const override { return 2; }
  int control_dim() const override { return 1; }
  VectorXd acceleration(const VectorXd& q, const VectorXd& v, const VectorXd& u) const override;
  AccelerationJacobians acceleration_jacobians(const VectorXd& q, const VectorXd& v,
                                               const VectorXd& u) const override;

  /// Kinetic plus potential energy (potential zero at the pivot height).
  double energy(const VectorXd& x) const;
  const ChainParams& params() const { return params_; }

 private:
  ChainParams params_;
};

/// Fully actuated planar L-link arm, written in absolute link angles
/// internally and exposed in relative joint coordinates.
class PlanarArm final : public MechanicalModel {
 public:
  explicit PlanarArm(ChainParams params = ChainParams::point_masses(3));

  int config_dim() const override { return params_.links(); }
  int velocity_dim() const override { return params_.links(); }
  int control_dim() const override { return params_.links(); }
  VectorXd acceleration(const VectorXd& q, const VectorXd& v, const VectorXd& u) const override;
  AccelerationJacobians acceleration_jacobians(const VectorXd& q, const VectorXd& v,
                                               const VectorXd& u) const override;

  /// Joint torques that hold configuration q at rest.
  VectorXd gravity_torque(const VectorXd& q) const;
  MatrixXd mass_matrix(const VectorXd& q) const;
  const ChainParams& params() const { return params_; }

 private:
  ChainParams params_;
};

struct QuadrotorParams {
  double mass = 1.0;
  double arm_length = 0.2;
  double yaw_coefficient = 0.02;  // rotor drag torque per unit thrust
  double inertia_x = 0.01;
  double inertia_y = 0.01;
  double inertia_z = 0.02;
  double gravity = 9.81;

  void validate() const;
  static QuadrotorParams from_key_values(const KeyValueFile& kv, const QuadrotorParams& defaults);
};

/// Rigid-body quadrotor with four rotors in the "+" (cross) layout: rotor 1
/// on +x, 2 on +y, 3 on -x, 4 on -y; rotors 1 and 3 spin opposite to 2 and 4.
///
/// State (p[3], eta[3], v[3], omega[3]): world position, ZYX Euler angles
/// (roll, pitch, yaw), world linear velocity, body angular velocity.
/// Control: four rotor thrusts.
class Quadrotor final : public MechanicalModel {
 public:
  explicit Quadrotor(QuadrotorParams params = {});

  int config_dim() const override { return 6; }
  int velocity_dim() const override { return 6; }
  int control_dim() const override { return 4; }
  VectorXd acceleration(const VectorXd& q, const VectorXd& v, const VectorXd& u) const override;
  AccelerationJacobians acceleration_jacobians(const VectorXd& q, const VectorXd& v,
                                               const VectorXd& u) const override;
  VectorXd config_rate(const VectorXd& q, const VectorXd& v) const override;
  void config_rate_jacobians(const VectorXd& q, const VectorXd& v, MatrixXd& dq,
                             MatrixXd& dv) const override;

  /// (collective thrust, body torque x, y, z) = mixer * thrusts.
  Eigen::Matrix4d mixer() const;
  double hover_thrust() const { return params_.mass * params_.gravity / 4.0; }
  const QuadrotorParams& params() const { return params_; }

 private:
  QuadrotorParams params_;
};

// ---------------------------------------------------------------------------
// Costs

class CostModel {
 public:
  virtual ~CostModel() = default;

  virtual double running(int k, const VectorXd& x, const VectorXd& u) const = 0;
  virtual double terminal(const VectorXd& x) const = 0;
  virtual CostExpansion running_expansion(int k, const VectorXd& x, const VectorXd& u) const = 0;
  virtual TerminalCostExpansion terminal_expansion(const VectorXd& x) const = 0;
};

/// l(x, u) = dx' Wx dx + du' Wu du + 2 du' Wux dx, phi(x) = dx' Wf dx with
/// dx = x - goal, du = u - control_ref. No 1/2 factor: the Hessians are
/// 2 Wx, 2 Wu, 2 Wux.
class QuadraticCost final : public CostModel {
 public:
  QuadraticCost(VectorXd goal, MatrixXd state_weight, MatrixXd control_weight,
                MatrixXd terminal_weight, VectorXd control_ref = {}, MatrixXd cross_weight = {});

  double running(int k, const VectorXd& x, const VectorXd& u) const override;
  double terminal(const VectorXd& x) const override;
  CostExpansion running_expansion(int k, const VectorXd& x, const VectorXd& u) const override;
  TerminalCostExpansion terminal_expansion(const VectorXd& x) const override;

  const VectorXd& goal() const { return goal_; }
  const VectorXd& control_ref() const { return control_ref_; }

 private:
  VectorXd goal_;
  VectorXd control_ref_;
  MatrixXd state_weight_;
  MatrixXd control_weight_;
  MatrixXd terminal_weight_;
  MatrixXd cross_weight_;
};

/// Random discrete linear-quadratic problem. A is rescaled to have spectral
/// radius `spectral_radius` (0 gives A = 0); costs are random PD with a
/// nonzero state/control cross term. Deterministic in `seed`.
OcpDefinition random_lq_system(int state_dim, int control_dim, int horizon, std::uint64_t seed,
                               double spectral_radius = 1.1);

}  // namespace msddp
