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

// Acrobot and planar L-link arm. The acrobot uses the textbook two-link
// equations in relative coordinates; the arm is derived independently in
// absolute link angles, so the two can be cross-checked at L = 2.

#include <cmath>
#include <stdexcept>

#include "msddp/models.hpp"

namespace msddp {

void ChainParams::validate() const {
  const auto L = mass.size();
  if (L < 1) throw std::invalid_argument("chain needs at least one link");
  if (length.size() != L || com.size() != L || inertia.size() != L) {
    throw std::invalid_argument("chain parameter lists must have one entry per link");
  }
  for (std::size_t i = 0; i < L; ++i) {
    if (!(mass[i] > 0.0) || !(length[i] > 0.0) || com[i] < 0.0 || inertia[i] < 0.0) {
      throw std::invalid_argument("chain link parameters must be positive");
    }
  }
}

ChainParams ChainParams::point_masses(int links) {
  ChainParams p;
  p.mass.assign(links, 1.0);
  p.length.assign(links, 1.0);
  p.com.assign(links, 1.0);
  p.inertia.assign(links, 0.0);
  return p;
}

ChainParams ChainParams::from_key_values(const KeyValueFile& kv, const ChainParams& defaults) {
  kv.require_known({"links", "mass", "length", "com", "inertia", "gravity"});
  ChainParams p = defaults;
  const int links = kv.get_int("links", defaults.links());
  if (links < 1) throw ConfigError(kv.qualified("links"), "links must be positive");
  auto list = [&](const std::string& key, const std::vector<double>& fallback) {
    std::vector<double> values = kv.get_vector(key, fallback);
    if (values.size() == 1 && links > 1) values.assign(links, values.front());
    if (static_cast<int>(values.size()) != links) {
      if (!kv.contains(key)) {
        // defaults sized for another link count: broadcast the first entry
        values.assign(links, fallback.empty() ? 1.0 : fallback.front());
      } else {
        throw ConfigError(kv.qualified(key), "key '" + kv.qualified(key) + "' needs " +
                                                 std::to_string(links) + " entries");
      }
    }
    return values;
  };
  p.mass = list("mass", defaults.mass);
  p.length = list("length", defaults.length);
  p.com = list("com", defaults.com);
  p.inertia = list("inertia", defaults.inertia);
  p.gravity = kv.get_double("gravity", defaults.gravity);
  p.validate();
  return p;
}

// ---------------------------------------------------------------------------
// Acrobot

Acrobot::Acrobot(ChainParams params) : params_(std::move(params)) {
  params_.validate();
  if (params_.links() != 2) throw std::invalid_argument("acrobot has exactly two links");
}

namespace {

struct AcrobotTerms {
  Eigen::Matrix2d M;
  Eigen::Vector2d bias;     // Coriolis/centrifugal C(q, v) v
  Eigen::Vector2d gravity;  // generalized gravity force (right-hand side)
};

AcrobotTerms acrobot_terms(const ChainParams& p, double th1, double th2, double w1, double w2) {
  const double m1 = p.mass[0], m2 = p.mass[1];
  const double l1 = p.length[0];
  const double lc1 = p.com[0], lc2 = p.com[1];
  const double I1 = p.inertia[0] + m1 * lc1 * lc1;
  const double I2 = p.inertia[1] + m2 * lc2 * lc2;
  const double g = p.gravity;
  const double c2 = std::cos(th2), s2 = std::sin(th2);
  const double s1 = std::sin(th1), s12 = std::sin(th1 + th2);

  AcrobotTerms t;
  t.M << I1 + I2 + m2 * l1 * l1 + 2.0 * m2 * l1 * lc2 * c2, I2 + m2 * l1 * lc2 * c2,
      I2 + m2 * l1 * lc2 * c2, I2;
  const double h = m2 * l1 * lc2 * s2;
  t.bias << -2.0 * h * w1 * w2 - h * w2 * w2, h * w1 * w1;
  t.gravity << -m1 * g * lc1 * s1 - m2 * g * (l1 * s1 + lc2 * s12), -m2 * g * lc2 * s12;
  return t;
}

}  // namespace

VectorXd Acrobot::acceleration(const VectorXd& q, const VectorXd& v, const VectorXd& u) const {
  const AcrobotTerms t = acrobot_terms(params_, q[0], q[1], v[0], v[1]);
  Eigen::Vector2d rhs = t.gravity - t.bias;
  rhs[1] += u[0];
  return t.M.ldlt().solve(rhs);
}

AccelerationJacobians Acrobot::acceleration_jacobians(const VectorXd& q, const VectorXd& v,
                                                      const VectorXd& u) const {
  const ChainParams& p = params_;
  const double m1 = p.mass[0], m2 = p.mass[1];
  const double l1 = p.length[0];
  const double lc1 = p.com[0], lc2 = p.com[1];
  const double g = p.gravity;
  const double th1 = q[0], th2 = q[1], w1 = v[0], w2 = v[1];
  const double c1 = std::cos(th1), c12 = std::cos(th1 + th2);
  const double c2 = std::cos(th2), s2 = std::sin(th2);

  const AcrobotTerms t = acrobot_terms(p, th1, th2, w1, w2);
  const auto ldlt = t.M.ldlt();
  Eigen::Vector2d rhs = t.gravity - t.bias;
  rhs[1] += u[0];
  const Eigen::Vector2d acc = ldlt.solve(rhs);

  const double h = m2 * l1 * lc2 * s2;
  const double dh = m2 * l1 * lc2 * c2;

  Eigen::Vector2d dgrav1(-m1 * g * lc1 * c1 - m2 * g * (l1 * c1 + lc2 * c12), -m2 * g * lc2 * c12);
  Eigen::Vector2d dgrav2(-m2 * g * lc2 * c12, -m2 * g * lc2 * c12);
  Eigen::Vector2d dbias2(-2.0 * dh * w1 * w2 - dh * w2 * w2, dh * w1 * w1);
  Eigen::Matrix2d dM2;
  dM2 << -2.0 * h, -h, -h, 0.0;  // h = m2 l1 lc2 sin(th2)

  AccelerationJacobians J;
  J.dq.resize(2, 2);
  J.dq.col(0) = ldlt.solve(dgrav1);
  J.dq.col(1) = ldlt.solve(Eigen::Vector2d(dgrav2 - dbias2 - dM2 * acc));

  Eigen::Matrix2d dbias_dv;
  dbias_dv << -2.0 * h * w2, -2.0 * h * w1 - 2.0 * h * w2, 2.0 * h * w1, 0.0;
  J.dv = -ldlt.solve(dbias_dv);
  J.du = ldlt.solve(Eigen::Vector2d(0.0, 1.0));
  return J;
}

double Acrobot::energy(const VectorXd& x) const {
  const ChainParams& p = params_;
  const AcrobotTerms t = acrobot_terms(p, x[0], x[1], x[2], x[3]);
  const Eigen::Vector2d w = x.tail<2>();
  const double kinetic = 0.5 * w.dot(t.M * w);
  const double potential = -p.mass[0] * p.gravity * p.com[0] * std::cos(x[0]) -
                           p.mass[1] * p.gravity *
                               (p.length[0] * std::cos(x[0]) + p.com[1] * std::cos(x[0] + x[1]));
  return kinetic + potential;
}

// ---------------------------------------------------------------------------
// Planar arm
//
// In absolute angles phi (phi = T q, T lower-triangular ones) the equations
// of motion read
//   sum_k D_jk cos(phi_j - phi_k) phi_dd_k + sum_k D_jk sin(phi_j - phi_k) phi_d_k^2
//     + g G_j sin(phi_j) = u_j - u_{j+1}
// with D_jk = sum_{i >= max(j,k)} m_i a_ij a_ik (+ I_j on the diagonal),
// a_ij = l_j for j < i and com_i for j = i, and G_j = sum_{i >= j} m_i a_ij.

namespace {

struct ChainConstants {
  MatrixXd D;
  VectorXd G;
};

ChainConstants chain_constants(const ChainParams& p) {
  const int L = p.links();
  auto lever = [&](int i, int j) { return j < i ? p.length[j] : p.com[i]; };
  ChainConstants c{MatrixXd::Zero(L, L), VectorXd::Zero(L)};
  for (int j = 0; j < L; ++j) {
    for (int k = 0; k < L; ++k) {
      for (int i = std::max(j, k); i < L; ++i) c.D(j, k) += p.mass[i] * lever(i, j) * lever(i, k);
    }
    c.D(j, j) += p.inertia[j];
    for (int i = j; i < L; ++i) c.G[j] += p.mass[i] * lever(i, j);
  }
  return c;
}

VectorXd cumsum(const VectorXd& q) {
  VectorXd phi(q.size());
  double acc = 0.0;
  for (int i = 0; i < q.size(); ++i) phi[i] = (acc += q[i]);
  return phi;
}

// T^{-1} y: first differences.
VectorXd difference(const VectorXd& y) {
  VectorXd out(y.size());
  for (int i = 0; i < y.size(); ++i) out[i] = y[i] - (i > 0 ? y[i - 1] : 0.0);
  return out;
}

MatrixXd cumsum_matrix(int L) { return MatrixXd::Ones(L, L).triangularView<Eigen::Lower>(); }

MatrixXd difference_matrix(int L) {
  MatrixXd T = MatrixXd::Identity(L, L);
  for (int i = 1; i < L; ++i) T(i, i - 1) = -1.0;
  return T;
}

}  // namespace

PlanarArm::PlanarArm(ChainParams params) : params_(std::move(params)) {
  params_.validate();
  if (params_.links() < 2) throw std::invalid_argument("planar arm needs at least two links");
}

MatrixXd PlanarArm::mass_matrix(const VectorXd& q) const {
  const int L = params_.links();
  const ChainConstants c = chain_constants(params_);
  const VectorXd phi = cumsum(q);
  MatrixXd Mphi(L, L);
  for (int j = 0; j < L; ++j)
    for (int k = 0; k < L; ++k) Mphi(j, k) = c.D(j, k) * std::cos(phi[j] - phi[k]);
  const MatrixXd T = cumsum_matrix(L);
  return T.transpose() * Mphi * T;
}

VectorXd PlanarArm::gravity_torque(const VectorXd& q) const {
  const int L = params_.links();
  const ChainConstants c = chain_constants(params_);
  const VectorXd phi = cumsum(q);
  VectorXd gphi(L);
  for (int j = 0; j < L; ++j) gphi[j] = params_.gravity * c.G[j] * std::sin(phi[j]);
  // u = T^T g_phi: suffix sums.
  VectorXd u(L);
  double acc = 0.0;
  for (int j = L - 1; j >= 0; --j) u[j] = (acc += gphi[j]);
  return u;
}

VectorXd PlanarArm::acceleration(const VectorXd& q, const VectorXd& v, const VectorXd& u) const {
  const int L = params_.links();
  const ChainConstants c = chain_constants(params_);
  const VectorXd phi = cumsum(q);
  const VectorXd w = cumsum(v);

  MatrixXd Mphi(L, L);
  VectorXd rhs(L);
  for (int j = 0; j < L; ++j) {
    double coriolis = 0.0;
    for (int k = 0; k < L; ++k) {
      Mphi(j, k) = c.D(j, k) * std::cos(phi[j] - phi[k]);
      coriolis += c.D(j, k) * std::sin(phi[j] - phi[k]) * w[k] * w[k];
    }
    const double torque = u[j] - (j + 1 < L ? u[j + 1] : 0.0);
    rhs[j] = torque - coriolis - params_.gravity * c.G[j] * std::sin(phi[j]);
  }
  return difference(Mphi.ldlt().solve(rhs));
}

AccelerationJacobians PlanarArm::acceleration_jacobians(const VectorXd& q, const VectorXd& v,
                                                        const VectorXd& u) const {
  const int L = params_.links();
  const ChainConstants c = chain_constants(params_);
  const VectorXd phi = cumsum(q);
  const VectorXd w = cumsum(v);
  const double g = params_.gravity;

  MatrixXd Mphi(L, L);
  VectorXd rhs(L);
  for (int j = 0; j < L; ++j) {
    double coriolis = 0.0;
    for (int k = 0; k < L; ++k) {
      Mphi(j, k) = c.D(j, k) * std::cos(phi[j] - phi[k]);
      coriolis += c.D(j, k) * std::sin(phi[j] - phi[k]) * w[k] * w[k];
    }
    const double torque = u[j] - (j + 1 < L ? u[j + 1] : 0.0);
    rhs[j] = torque - coriolis - g * c.G[j] * std::sin(phi[j]);
  }
  const auto ldlt = Mphi.ldlt();
  const VectorXd acc = ldlt.solve(rhs);

  // d(rhs - Mphi acc)/dphi_i, column by column.
  MatrixXd dres_dphi = MatrixXd::Zero(L, L);
  MatrixXd dres_dw = MatrixXd::Zero(L, L);
  for (int i = 0; i < L; ++i) {
    for (int j = 0; j < L; ++j) {
      double dcor = 0.0;
      double dMacc = 0.0;
      if (j == i) {
        for (int k = 0; k < L; ++k) {
          if (k == i) continue;
          dcor += c.D(i, k) * std::cos(phi[i] - phi[k]) * w[k] * w[k];
          dMacc -= c.D(i, k) * std::sin(phi[i] - phi[k]) * acc[k];
        }
      } else {
        dcor = -c.D(j, i) * std::cos(phi[j] - phi[i]) * w[i] * w[i];
        dMacc = c.D(j, i) * std::sin(phi[j] - phi[i]) * acc[i];
      }
      const double dgrav = j == i ? g * c.G[j] * std::cos(phi[j]) : 0.0;
      dres_dphi(j, i) = -dcor - dgrav - dMacc;
      dres_dw(j, i) = -2.0 * c.D(j, i) * std::sin(phi[j] - phi[i]) * w[i];
    }
  }

  const MatrixXd T = cumsum_matrix(L);
  const MatrixXd Tinv = difference_matrix(L);
  AccelerationJacobians J;
  J.dq = Tinv * ldlt.solve(dres_dphi) * T;
  J.dv = Tinv * ldlt.solve(dres_dw) * T;
  J.du = Tinv * ldlt.solve(MatrixXd(Tinv.transpose()));
  return J;
}

}  // namespace msddp
