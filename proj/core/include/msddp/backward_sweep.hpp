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

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "msddp/derivatives.hpp"
#include "msddp/ocp.hpp"

namespace msddp {

/// The four backward-sweep flavours. Multiple shooting adds the defect terms
/// S d to the gradients; second order adds the s . f_** tensor contractions.
struct SweepVariant {
  bool multiple_shooting = true;
  bool second_order = true;

  static constexpr SweepVariant ms_ddp() { return {true, true}; }
  static constexpr SweepVariant ss_ddp() { return {false, true}; }
  static constexpr SweepVariant ms_ilqr() { return {true, false}; }
  static constexpr SweepVariant ss_ilqr() { return {false, false}; }

  ExpansionOrder expansion_order() const {
    return second_order ? ExpansionOrder::kSecond : ExpansionOrder::kFirst;
  }
  friend bool operator==(const SweepVariant&, const SweepVariant&) = default;
};

/// "ms-ddp", "ss-ddp", "ms-ilqr", "ss-ilqr".
SweepVariant parse_variant(std::string_view name);
std::string to_string(SweepVariant variant);

struct SweepOptions {
  SweepVariant variant = SweepVariant::ms_ddp();
  double regularization = 0.0;
  /// Penalty weight on the left-side mismatch at shooting nodes; an empty
  /// matrix disables the penalty.
  MatrixXd penalty;
};

/// Quadratic model v_k(dx) = 1/2 dx' S_k dx + s_k' dx + c_k.
struct ValueExpansion {
  std::vector<MatrixXd> hessian;   // S_k, k = 0..N
  std::vector<VectorXd> gradient;  // s_k
  std::vector<double> constant;    // c_k, with c_N = 0
};

/// du* = feedforward + gain * dx.
struct Policy {
  std::vector<VectorXd> feedforward;
  std::vector<MatrixXd> gain;

  int horizon() const { return static_cast<int>(feedforward.size()); }
  double feedforward_inf_norm() const;
};

/// EC(alpha) = alpha * first + 1/2 alpha^2 * second.
struct ExpectedCostCoefficients {
  double first = 0.0;
  double second = 0.0;

  double at(double alpha) const { return alpha * first + 0.5 * alpha * alpha * second; }
};

struct BackwardPassResult {
  ValueExpansion value;
  Policy policy;
  /// Feedforward-only model sum(Q_u' k) + 1/2 sum(k' Q_uu k) accumulated
  /// during the sweep; the "approximate" expectation model.
  ExpectedCostCoefficients approximate_ec;
};

/// Regularized Q_uu failed the Cholesky factorization at `node`.
class NotPositiveDefinite : public std::runtime_error {
 public:
  explicit NotPositiveDefinite(int node)
      : std::runtime_error("Q_uu not positive definite at node " + std::to_string(node)),
        node_(node) {}
  int node() const { return node_; }

 private:
  int node_;
};

/// Defect-aware Riccati recursion from node N down to 0.
///
/// Single-shooting variants require a trajectory without defects. Throws
/// NotPositiveDefinite if the regularized Q_uu cannot be factored; no
/// partial result is returned in that case.
BackwardPassResult backward_sweep(const LocalModel& local, const Trajectory& traj,
                                  const ShootingPlan& plan, const SweepOptions& opts);

/// Exact expected cost change of the step: a unit linear roll-out of the
/// policy yields (dx, du), then
///   first  = q_N' dx_N + sum q_k' dx_k + r_k' du_k
///   second = dx_N' Q_N dx_N + sum dx' Q dx + du' R du + 2 du' P dx.
ExpectedCostCoefficients expected_cost_coefficients(const Policy& policy, const LocalModel& local,
                                                    const Trajectory& traj);

}  // namespace msddp
