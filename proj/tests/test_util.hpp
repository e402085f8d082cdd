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

#include <memory>
#include <random>

#include <Eigen/Dense>

#include "msddp/models.hpp"
#include "msddp/ocp.hpp"

namespace msddp::testing {

inline VectorXd uniform(std::mt19937_64& rng, int n, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = dist(rng);
  return v;
}

/// max |a - b| / max(1, max |b|).
inline double relative_error(const MatrixXd& a, const MatrixXd& b) {
  const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

/// Central-difference Jacobians of `step`, written independently of the
/// library helpers.
template <typename Step>
void central_jacobians(Step step, const VectorXd& x, const VectorXd& u, double h, MatrixXd& A,
                       MatrixXd& B) {
  const VectorXd f0 = step(x, u);
  A.resize(f0.size(), x.size());
  B.resize(f0.size(), u.size());
  for (int j = 0; j < x.size(); ++j) {
    VectorXd xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    A.col(j) = (step(xp, u) - step(xm, u)) / (2 * h);
  }
  for (int j = 0; j < u.size(); ++j) {
    VectorXd up = u, um = u;
    up[j] += h;
    um[j] -= h;
    B.col(j) = (step(x, up) - step(x, um)) / (2 * h);
  }
}

inline std::shared_ptr<SemiImplicitEuler> discretize(std::shared_ptr<const MechanicalModel> m,
                                                     double dt = 0.02) {
  return std::make_shared<SemiImplicitEuler>(std::move(m), dt);
}

/// Random state in a benign region of the benchmark's operating domain.
inline VectorXd random_state(std::mt19937_64& rng, int nq, int nv) {
  VectorXd x(nq + nv);
  x.head(nq) = uniform(rng, nq, -1.2, 1.2);
  x.tail(nv) = uniform(rng, nv, -2.0, 2.0);
  return x;
}

}  // namespace msddp::testing
