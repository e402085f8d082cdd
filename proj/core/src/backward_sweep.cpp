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

#include "msddp/backward_sweep.hpp"

#include <algorithm>

#include "msddp/rollout.hpp"

namespace msddp {

SweepVariant parse_variant(std::string_view name) {
  if (name == "ms-ddp") return SweepVariant::ms_ddp();
  if (name == "ss-ddp") return SweepVariant::ss_ddp();
  if (name == "ms-ilqr") return SweepVariant::ms_ilqr();
  if (name == "ss-ilqr") return SweepVariant::ss_ilqr();
  throw std::invalid_argument("unknown sweep variant '" + std::string(name) + "'");
}

std::string to_string(SweepVariant variant) {
  std::string out = variant.multiple_shooting ? "ms-" : "ss-";
  out += variant.second_order ? "ddp" : "ilqr";
  return out;
}

double Policy::feedforward_inf_norm() const {
  double m = 0.0;
  for (const auto& k : feedforward) m = std::max(m, k.cwiseAbs().maxCoeff());
  return m;
}

BackwardPassResult backward_sweep(const LocalModel& local, const Trajectory& traj,
                                  const ShootingPlan& plan, const SweepOptions& opts) {
  const int N = local.horizon();
  if (traj.horizon() != N || plan.horizon() != N) {
    throw DimensionError("backward_sweep: horizon mismatch");
  }
  if (opts.variant.second_order && !local.has_tensors()) {
    throw std::invalid_argument("second-order sweep needs a second-order local model");
  }
  if (!opts.variant.multiple_shooting) {
    for (const auto& d : traj.defects) {
      if (!d.isZero(0.0)) {
        throw std::invalid_argument("single-shooting sweep requires a defect-free trajectory");
      }
    }
  }
  const bool use_penalty = opts.penalty.size() > 0;

  const int m = traj.control_dim();

  BackwardPassResult out;
  ValueExpansion& V = out.value;
  Policy& pi = out.policy;
  V.hessian.resize(N + 1);
  V.gradient.resize(N + 1);
  V.constant.assign(N + 1, 0.0);
  pi.feedforward.resize(N);
  pi.gain.resize(N);

  V.hessian[N] = local.terminal.Q;
  V.gradient[N] = local.terminal.q;
  V.constant[N] = 0.0;

  const MatrixXd reg = opts.regularization * MatrixXd::Identity(m, m);

  for (int k = N - 1; k >= 0; --k) {
    const CostExpansion& c = local.cost[k];
    const DynamicsExpansion& f = local.dynamics[k];
    const VectorXd& d = traj.defects[k];

    MatrixXd S = V.hessian[k + 1];
    VectorXd s = V.gradient[k + 1];
    if (use_penalty && plan.is_shooting(k + 1)) {
      s -= opts.penalty * d;
      S += opts.penalty;
    }

    // Gradient of v_{k+1} at the predicted perturbation dx_{k+1} = d.
    VectorXd s_eff = s;
    if (opts.variant.multiple_shooting) s_eff += S * d;

    const MatrixXd SA = S * f.A;
    VectorXd Qx = c.q + f.A.transpose() * s_eff;
    VectorXd Qu = c.r + f.B.transpose() * s_eff;
    MatrixXd Qxx = c.Q + f.A.transpose() * SA;
    MatrixXd Quu = c.R + f.B.transpose() * S * f.B;
    MatrixXd Qux = c.P + f.B.transpose() * SA;
    if (opts.variant.second_order) {
      const DynamicsTensors& t = *f.tensors;
      Qxx += contract(s, t.xx);
      Quu += contract(s, t.uu);
      Qux += contract(s, t.ux);
    }
    Qxx = 0.5 * (Qxx + Qxx.transpose()).eval();
    Quu = 0.5 * (Quu + Quu.transpose()).eval();

    Eigen::LLT<MatrixXd> llt(Quu + reg);
    if (llt.info() != Eigen::Success) throw NotPositiveDefinite(k);

    VectorXd ff = -llt.solve(Qu);
    MatrixXd K = -llt.solve(Qux);

    const MatrixXd KtQuu = K.transpose() * Quu;
    MatrixXd Sk = Qxx + KtQuu * K + K.transpose() * Qux + Qux.transpose() * K;
    V.hessian[k] = 0.5 * (Sk + Sk.transpose());
    V.gradient[k] = Qx + KtQuu * ff + K.transpose() * Qu + Qux.transpose() * ff;

    double constant = V.constant[k + 1] + ff.dot(Qu) + 0.5 * ff.dot(Quu * ff);
    if (opts.variant.multiple_shooting) constant += s.dot(d) + 0.5 * d.dot(S * d);
    V.constant[k] = constant;

    out.approximate_ec.first += ff.dot(Qu);
    out.approximate_ec.second += ff.dot(Quu * ff);

    pi.feedforward[k] = std::move(ff);
    pi.gain[k] = std::move(K);
  }
  return out;
}

ExpectedCostCoefficients expected_cost_coefficients(const Policy& policy, const LocalModel& local,
                                                    const Trajectory& traj) {
  const LinearPerturbation p = linear_rollout(traj, policy, local, 1.0);
  const int N = local.horizon();
  ExpectedCostCoefficients ec;
  for (int k = 0; k < N; ++k) {
    const CostExpansion& c = local.cost[k];
    const VectorXd& dx = p.dx[k];
    const VectorXd& du = p.du[k];
    ec.first += c.q.dot(dx) + c.r.dot(du);
    ec.second += dx.dot(c.Q * dx) + du.dot(c.R * du) + 2.0 * du.dot(c.P * dx);
  }
  ec.first += local.terminal.q.dot(p.dx[N]);
  ec.second += p.dx[N].dot(local.terminal.Q * p.dx[N]);
  return ec;
}

}  // namespace msddp
