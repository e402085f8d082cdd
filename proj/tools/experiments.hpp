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
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "msddp/key_value.hpp"
#include "msddp/problems.hpp"
#include "msddp/solver.hpp"

namespace msddp::experiments {

/// Problem plus solver settings resolved from a config file and CLI flags.
/// Flag values take precedence over the file.
struct RunSettings {
  std::string problem = "quadrotor";
  KeyValueFile config;
  std::uint64_t seed = 1;
  std::optional<std::string> preset;
  std::optional<double> penalty;
  std::optional<int> segments;
};

/// Throws ConfigError naming the first key neither the problem nor the
/// solver understands.
void check_config_keys(const KeyValueFile& kv);

BenchmarkProblem build_problem(const RunSettings& s);
SolverConfig build_solver_config(const RunSettings& s, std::string_view default_preset);
ShootingPlan build_plan(const RunSettings& s, const BenchmarkProblem& p);

// ---------------------------------------------------------------------------

struct SolveOutcome {
  BenchmarkProblem problem;
  ShootingPlan plan = ShootingPlan::single(1);
  SolverConfig config;
  SolveResult result;
};

/// Single-shooting presets use one segment unless segments are set explicitly.
SolveOutcome run_solve(const RunSettings& s);

// ---------------------------------------------------------------------------

struct RateRow {
  std::string variant;
  std::string rollout;
  RateFit fit;
};

struct LocalConvergenceOptions {
  int samples = 100;
  int segments = 200;
  double radius = 1e-2;
  std::uint64_t seed = 1;
};

struct LocalConvergenceResult {
  Trajectory optimum;
  SolveStatus optimum_status = SolveStatus::kMaxIterations;
  std::vector<RateRow> rows;
};

/// Tight solve for the optimum, then rate fits for
/// {ms-ddp, ms-ilqr} x {nonlinear, hybrid}.
LocalConvergenceResult run_local_convergence(const RunSettings& s,
                                             const LocalConvergenceOptions& opts);

/// Median over usable samples (NaN when none are usable).
double median_epsilon(const std::vector<RateRow>& rows, const std::string& variant,
                      const std::string& rollout);
double median_kappa(const std::vector<RateRow>& rows, const std::string& variant,
                    const std::string& rollout);
int usable_count(const std::vector<RateRow>& rows, const std::string& variant,
                 const std::string& rollout);

void write_rate_csv(std::ostream& out, const std::vector<RateRow>& rows);

// ---------------------------------------------------------------------------

struct EcHistory {
  std::string preset;
  SolveResult result;
};

struct EcSample {
  std::string model;  // "exact" or "approximate"
  double alpha = 0.0;
  double expected = 0.0;
  double actual = 0.0;
};

struct EcStudyResult {
  std::vector<EcHistory> histories;
  std::vector<EcSample> samples;
  int probe_iteration = 0;
};

/// Acrobot histories for "filqr", "filqr-exact" and "msilqr-exact", and an
/// alpha sweep of both expectation models at the iterate reached after
/// `probe_iterations` accepted filqr-exact steps.
EcStudyResult run_ec_study(const RunSettings& s, int probe_iterations = 3);

void write_ec_history_csv(std::ostream& out, const std::vector<EcHistory>& histories);
void write_ec_alpha_csv(std::ostream& out, const std::vector<EcSample>& samples);

/// Relative mismatch of the secant slopes EC(a)/a and dJ(a)/a at `alpha`.
double secant_slope_mismatch(const std::vector<EcSample>& samples, const std::string& model,
                             double alpha = 0.05);

// ---------------------------------------------------------------------------

struct PenaltyRow {
  std::string problem;
  int segments = 0;
  double penalty = 0.0;
  std::string status;  // solve status, or "skipped"
  int iterations = 0;
  double cost = 0.0;
  double mean_alpha = 0.0;
  std::string note;
};

/// Solves with and without the penalty for every segment count.
std::vector<PenaltyRow> run_penalty_study(const RunSettings& s, const std::vector<int>& segments,
                                          double penalty);

void write_penalty_csv(std::ostream& out, const std::vector<PenaltyRow>& rows);

/// Writes `text` to `dir / name`, creating `dir`.
void write_file(const std::filesystem::path& dir, const std::string& name,
                const std::string& text);

}  // namespace msddp::experiments
