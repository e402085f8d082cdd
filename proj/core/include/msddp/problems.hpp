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
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "msddp/key_value.hpp"
#include "msddp/ocp.hpp"

namespace msddp {

/// A ready-to-solve benchmark: problem definition plus its standard
/// initialization.
struct BenchmarkProblem {
  std::string name;
  OcpDefinition ocp;
  Trajectory initial_guess;
  /// Segment count used when none is requested (see ShootingPlan::even).
  int default_segments = 1;
};

/// "acrobot", "quadrotor", "arm", "lq".
std::vector<std::string> problem_names();

/// Problem keys accepted by config files: `horizon`, `dt`, `segments`,
/// `lq.*`, and the prefixed groups `model.` and `cost.` (see README).
const std::set<std::string>& problem_config_keys();
const std::vector<std::string>& problem_config_prefixes();

/// Builds a benchmark with its defaults overridden by `kv`. `seed` only
/// affects the random LQ problem. Throws ConfigError on bad keys or values.
BenchmarkProblem make_problem(std::string_view name, const KeyValueFile& kv = {},
                              std::uint64_t seed = 1);

/// Straight-line state interpolation from x0 to `goal` with constant
/// controls `control`.
Trajectory interpolated_guess(const VectorXd& x0, const VectorXd& goal, int horizon,
                              const VectorXd& control);

}  // namespace msddp
