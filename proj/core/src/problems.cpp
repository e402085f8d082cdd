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

#include "msddp/problems.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <random>

#include "msddp/models.hpp"

namespace msddp {

namespace {

constexpr double kPi = std::numbers::pi;

VectorXd vector_key(const KeyValueFile& kv, const std::string& key, const VectorXd& fallback) {
  if (!kv.contains(key)) return fallback;
  const std::vector<double> values = kv.get_vector(key, {});
  const auto n = fallback.size();
  if (values.size() == 1) return VectorXd::Constant(n, values.front());
  if (static_cast<Eigen::Index>(values.size()) != n) {
    throw ConfigError(kv.qualified(key),
                      "key '" + kv.qualified(key) + "' needs " + std::to_string(n) + " entries");
  }
  return Eigen::Map<const VectorXd>(values.data(), n);
}

struct CostDefaults {
  VectorXd state;
  VectorXd control;
  VectorXd terminal;
};

std::shared_ptr<const QuadraticCost> diagonal_cost(const KeyValueFile& kv, const VectorXd& goal,
                                                   const CostDefaults& d,
                                                   const VectorXd& control_ref) {
  const KeyValueFile c = kv.scoped("cost.");
  c.require_known({"state_weight", "control_weight", "terminal_weight"});
  const VectorXd wx = vector_key(c, "state_weight", d.state);
  const VectorXd wu = vector_key(c, "control_weight", d.control);
  const VectorXd wf = vector_key(c, "terminal_weight", d.terminal);
  if ((wx.array() < 0.0).any() || (wf.array() < 0.0).any() || (wu.array() <= 0.0).any()) {
    throw ConfigError("cost", "state weights must be nonnegative and control weights positive");
  }
  return std::make_shared<QuadraticCost>(goal, MatrixXd(wx.asDiagonal()), MatrixXd(wu.asDiagonal()),
                                         MatrixXd(wf.asDiagonal()), control_ref);
}

void apply_timing(const KeyValueFile& kv, OcpDefinition& ocp) {
  ocp.horizon = kv.get_int("horizon", ocp.horizon);
  ocp.dt = kv.get_double("dt", ocp.dt);
  if (ocp.horizon < 2) throw ConfigError("horizon", "horizon must be at least 2");
  if (!(ocp.dt > 0.0)) throw ConfigError("dt", "dt must be positive");
}

int segments_key(const KeyValueFile& kv, int horizon) {
  const int segments = kv.get_int("segments", horizon);
  if (segments < 1 || segments > horizon) {
    throw ConfigError("segments", "segments must lie in [1, horizon]");
  }
  return segments;
}

BenchmarkProblem acrobot(const KeyValueFile& kv) {
  BenchmarkProblem p;
  p.name = "acrobot";
  p.ocp.horizon = 200;
  p.ocp.dt = 0.02;
  apply_timing(kv, p.ocp);
  const ChainParams params =
      ChainParams::from_key_values(kv.scoped("model."), ChainParams::point_masses(2));
  if (params.links() != 2) throw ConfigError("model.links", "the acrobot has two links");
  p.ocp.dynamics = std::make_shared<SemiImplicitEuler>(std::make_shared<Acrobot>(params), p.ocp.dt);

  const VectorXd x0 = vector_key(kv, "initial_state", VectorXd::Zero(4));
  const VectorXd goal = vector_key(kv, "goal", (VectorXd(4) << kPi, 0.0, 0.0, 0.0).finished());
  const CostDefaults w{(VectorXd(4) << 3.0, 3.0, 3e-2, 3e-2).finished(), VectorXd::Constant(1, 3e-4),
                       (VectorXd(4) << 1000.0, 1000.0, 30.0, 30.0).finished()};
  p.ocp.cost = diagonal_cost(kv, goal, w, VectorXd::Zero(1));
  p.ocp.initial_state = x0;
  p.initial_guess = interpolated_guess(x0, goal, p.ocp.horizon, VectorXd::Zero(1));
  p.default_segments = segments_key(kv, p.ocp.horizon);
  return p;
}

BenchmarkProblem quadrotor(const KeyValueFile& kv) {
  BenchmarkProblem p;
  p.name = "quadrotor";
  p.ocp.horizon = 200;
  p.ocp.dt = 0.02;
  apply_timing(kv, p.ocp);
  const auto model = std::make_shared<Quadrotor>(
      QuadrotorParams::from_key_values(kv.scoped("model."), QuadrotorParams{}));
  p.ocp.dynamics = std::make_shared<SemiImplicitEuler>(model, p.ocp.dt);

  VectorXd start = VectorXd::Zero(12);
  start(2) = 1.0;
  VectorXd target = start;
  target(0) = 5.0;
  const VectorXd x0 = vector_key(kv, "initial_state", start);
  const VectorXd goal = vector_key(kv, "goal", target);
  const VectorXd hover = VectorXd::Constant(4, model->hover_thrust());
  VectorXd terminal(12);
  terminal << VectorXd::Constant(3, 100.0), VectorXd::Constant(3, 100.0),
      VectorXd::Constant(3, 10.0), VectorXd::Constant(3, 10.0);
  const CostDefaults w{VectorXd::Constant(12, 1e-3), VectorXd::Constant(4, 1e-2), terminal};
  p.ocp.cost = diagonal_cost(kv, goal, w, hover);
  p.ocp.initial_state = x0;
  p.initial_guess = interpolated_guess(x0, goal, p.ocp.horizon, hover);
  p.default_segments = segments_key(kv, p.ocp.horizon);
  return p;
}

BenchmarkProblem arm(const KeyValueFile& kv) {
  BenchmarkProblem p;
  p.name = "arm";
  p.ocp.horizon = 200;
  p.ocp.dt = 0.02;
  apply_timing(kv, p.ocp);
  const auto model = std::make_shared<PlanarArm>(
      ChainParams::from_key_values(kv.scoped("model."), ChainParams::point_masses(3)));
  const int L = model->config_dim();
  if (L < 2) throw ConfigError("model.links", "the arm needs at least two links");
  p.ocp.dynamics = std::make_shared<SemiImplicitEuler>(model, p.ocp.dt);

  VectorXd upright = VectorXd::Zero(2 * L);
  upright(0) = kPi;
  VectorXd bent = VectorXd::Zero(2 * L);
  bent(0) = 0.5 * kPi;
  for (int j = 1; j < L; ++j) bent(j) = 0.5 * kPi;
  const VectorXd x0 = vector_key(kv, "initial_state", upright);
  const VectorXd goal = vector_key(kv, "goal", bent);
  VectorXd terminal(2 * L);
  terminal << VectorXd::Constant(L, 100.0), VectorXd::Constant(L, 10.0);
  const CostDefaults w{VectorXd::Constant(2 * L, 1e-3), VectorXd::Constant(L, 1e-2), terminal};
  p.ocp.cost = diagonal_cost(kv, goal, w, VectorXd::Zero(L));
  p.ocp.initial_state = x0;
  p.initial_guess = interpolated_guess(x0, goal, p.ocp.horizon, VectorXd::Zero(L));
  // Hold each interpolated configuration against gravity.
  for (int k = 0; k < p.ocp.horizon; ++k) {
    p.initial_guess.controls[k] = model->gravity_torque(p.initial_guess.states[k].head(L));
  }
  p.default_segments = segments_key(kv, p.ocp.horizon);
  return p;
}

BenchmarkProblem lq(const KeyValueFile& kv, std::uint64_t seed) {
  const KeyValueFile l = kv.scoped("lq.");
  l.require_known({"state_dim", "control_dim", "spectral_radius"});
  const int n = l.get_int("state_dim", 4);
  const int m = l.get_int("control_dim", 2);
  const int N = kv.get_int("horizon", 50);
  if (n < 1) throw ConfigError("lq.state_dim", "lq.state_dim must be positive");
  if (m < 1) throw ConfigError("lq.control_dim", "lq.control_dim must be positive");
  if (N < 2) throw ConfigError("horizon", "horizon must be at least 2");

  BenchmarkProblem p;
  p.name = "lq";
  p.ocp = random_lq_system(n, m, N, seed, l.get_double("spectral_radius", 1.1));
  p.initial_guess = Trajectory(N, n, m);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> normal(0.0, 1.0);
  p.initial_guess.states[0] = p.ocp.initial_state;
  for (int k = 1; k <= N; ++k) {
    for (int i = 0; i < n; ++i) p.initial_guess.states[k](i) = normal(rng);
  }
  p.default_segments = segments_key(kv, N);
  if (!kv.contains("segments")) {
    p.default_segments = 1;
    for (int M = 7; M > 1; --M) {
      if ((N - 1) % M == 0) {
        p.default_segments = M;
        break;
      }
    }
  }
  return p;
}

}  // namespace

std::vector<std::string> problem_names() { return {"acrobot", "quadrotor", "arm", "lq"}; }

const std::set<std::string>& problem_config_keys() {
  static const std::set<std::string> keys = {"horizon", "dt", "segments", "initial_state", "goal"};
  return keys;
}

const std::vector<std::string>& problem_config_prefixes() {
  static const std::vector<std::string> prefixes = {"model.", "cost.", "lq."};
  return prefixes;
}

BenchmarkProblem make_problem(std::string_view name, const KeyValueFile& kv, std::uint64_t seed) {
  BenchmarkProblem p;
  if (name == "acrobot") {
    p = acrobot(kv);
  } else if (name == "quadrotor") {
    p = quadrotor(kv);
  } else if (name == "arm") {
    p = arm(kv);
  } else if (name == "lq") {
    p = lq(kv, seed);
  } else {
    throw ConfigError("problem", "unknown problem '" + std::string(name) + "'");
  }
  try {
    p.ocp.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("", std::string(name) + ": " + e.what());
  }
  return p;
}

Trajectory interpolated_guess(const VectorXd& x0, const VectorXd& goal, int horizon,
                              const VectorXd& control) {
  if (x0.size() != goal.size()) throw DimensionError("interpolated_guess: dimension mismatch");
  Trajectory t(horizon, static_cast<int>(x0.size()), static_cast<int>(control.size()));
  for (int k = 0; k <= horizon; ++k) {
    const double s = static_cast<double>(k) / horizon;
    t.states[k] = (1.0 - s) * x0 + s * goal;
  }
  for (int k = 0; k < horizon; ++k) t.controls[k] = control;
  return t;
}

}  // namespace msddp
