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
#include <cstdio>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "experiments.hpp"

namespace {

using namespace msddp;
using namespace msddp::experiments;

constexpr int kExitConverged = 0;
constexpr int kExitFailure = 1;
constexpr int kExitStalled = 2;
constexpr int kExitMaxIterations = 3;
constexpr int kExitConfig = 64;

struct Flags {
  std::string problem;
  std::string positional_problem;
  std::string config;
  std::uint64_t seed = 1;
  int samples = 100;
  std::vector<int> segments;
  double radius = 1e-2;
  std::string out = "out";
  std::string preset;
  double penalty = -1.0;
};

void add_common(CLI::App* cmd, Flags& f, bool with_problem) {
  if (with_problem) {
    cmd->add_option("problem_name", f.positional_problem, "acrobot | quadrotor | arm | lq");
    cmd->add_option("--problem", f.problem, "acrobot | quadrotor | arm | lq");
  }
  cmd->add_option("--config", f.config, "key = value config file");
  cmd->add_option("--seed", f.seed, "random seed");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--preset", f.preset, "named solver configuration");
}

RunSettings settings(const Flags& f, const std::string& default_problem) {
  RunSettings s;
  s.problem = !f.problem.empty()            ? f.problem
              : !f.positional_problem.empty() ? f.positional_problem
                                              : default_problem;
  if (!f.config.empty()) s.config = KeyValueFile::load(f.config);
  s.seed = f.seed;
  if (!f.preset.empty()) s.preset = f.preset;
  if (f.penalty >= 0.0) s.penalty = f.penalty;
  return s;
}

int status_exit(SolveStatus status) {
  switch (status) {
    case SolveStatus::kConverged:
      return kExitConverged;
    case SolveStatus::kStalled:
      return kExitStalled;
    default:
      return kExitMaxIterations;
  }
}

int cmd_solve(const Flags& f) {
  RunSettings s = settings(f, "quadrotor");
  if (f.segments.size() > 1) throw ConfigError("segments", "solve takes a single segment count");
  if (!f.segments.empty()) s.segments = f.segments.front();
  const SolveOutcome o = run_solve(s);
  std::ostringstream traj, hist;
  write_trajectory_csv(traj, o.result.trajectory);
  write_history_csv(hist, o.result.history);
  write_file(f.out, "trajectory.csv", traj.str());
  write_file(f.out, "history.csv", hist.str());
  std::printf("%s: %s after %d iterations, cost %.6e, defect %.3e\n", s.problem.c_str(),
              to_string(o.result.status).c_str(), o.result.iterations, o.result.cost,
              o.result.defect);
  return status_exit(o.result.status);
}

int cmd_local_convergence(const Flags& f) {
  const RunSettings s = settings(f, "quadrotor");
  LocalConvergenceOptions opts;
  opts.samples = f.samples;
  opts.radius = f.radius;
  opts.seed = f.seed;
  if (f.segments.size() > 1) throw ConfigError("segments", "takes a single segment count");
  if (!f.segments.empty()) opts.segments = f.segments.front();
  if (opts.samples < 0) throw ConfigError("samples", "samples must be nonnegative");
  if (!(opts.radius >= 0.0)) throw ConfigError("radius", "radius must be nonnegative");

  std::ostringstream csv;
  if (opts.samples == 0) {
    write_rate_csv(csv, {});
    write_file(f.out, "local_convergence.csv", csv.str());
    return kExitConverged;
  }
  const LocalConvergenceResult r = run_local_convergence(s, opts);
  write_rate_csv(csv, r.rows);
  write_file(f.out, "local_convergence.csv", csv.str());
  std::printf("optimum: %s\n", to_string(r.optimum_status).c_str());
  for (const char* v : {"ms-ddp", "ms-ilqr"}) {
    for (const char* ro : {"nonlinear", "hybrid"}) {
      std::printf("%-8s %-10s usable %3d/%d  median epsilon %.3f  median kappa %.3e\n", v, ro,
                  usable_count(r.rows, v, ro), opts.samples, median_epsilon(r.rows, v, ro),
                  median_kappa(r.rows, v, ro));
    }
  }
  return kExitConverged;
}

int cmd_ec_study(const Flags& f) {
  const RunSettings s = settings(f, "acrobot");
  const EcStudyResult r = run_ec_study(s);
  std::ostringstream hist, alpha;
  write_ec_history_csv(hist, r.histories);
  write_ec_alpha_csv(alpha, r.samples);
  write_file(f.out, "ec_history.csv", hist.str());
  write_file(f.out, "ec_alpha.csv", alpha.str());
  for (const EcHistory& h : r.histories) {
    std::printf("%-14s %s after %d iterations\n", h.preset.c_str(),
                to_string(h.result.status).c_str(), h.result.iterations);
  }
  std::printf("secant slope mismatch at alpha=0.05: exact %.3e, approximate %.3e\n",
              secant_slope_mismatch(r.samples, "exact"),
              secant_slope_mismatch(r.samples, "approximate"));
  return kExitConverged;
}

int cmd_penalty_study(const Flags& f) {
  const RunSettings s = settings(f, "quadrotor");
  const std::vector<int> segments =
      f.segments.empty() ? std::vector<int>{2, 4, 8, 16, 32} : f.segments;
  const double qd = f.penalty >= 0.0 ? f.penalty : 1.0;
  const std::vector<PenaltyRow> rows = run_penalty_study(s, segments, qd);
  std::ostringstream csv;
  write_penalty_csv(csv, rows);
  write_file(f.out, "penalty.csv", csv.str());
  for (const PenaltyRow& r : rows) {
    if (r.status == "skipped") {
      std::fprintf(stderr, "warning: M=%d skipped: %s\n", r.segments, r.note.c_str());
      continue;
    }
    std::printf("M=%-3d q_d=%-5g %-14s %4d iterations  cost %.6e  mean alpha %.3f\n", r.segments,
                r.penalty, r.status.c_str(), r.iterations, r.cost, r.mean_alpha);
  }
  return kExitConverged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiple-shooting DDP benchmarks"};
  app.require_subcommand(1);
  Flags f;

  CLI::App* solve_cmd = app.add_subcommand("solve", "run one solve");
  add_common(solve_cmd, f, true);
  solve_cmd->add_option("--segments", f.segments, "shooting segment count");
  solve_cmd->add_option("--penalty", f.penalty, "penalty weight q_d");

  CLI::App* rate_cmd = app.add_subcommand("local-convergence", "local convergence rates");
  add_common(rate_cmd, f, true);
  rate_cmd->add_option("--samples", f.samples, "Monte Carlo samples");
  rate_cmd->add_option("--segments", f.segments, "shooting segment count");
  rate_cmd->add_option("--radius", f.radius, "state perturbation radius");

  CLI::App* ec_cmd = app.add_subcommand("ec-study", "expected cost change ablation");
  add_common(ec_cmd, f, false);

  CLI::App* pen_cmd = app.add_subcommand("penalty-study", "penalty ablation");
  add_common(pen_cmd, f, true);
  pen_cmd->add_option("--segments", f.segments, "segment counts")->delimiter(',');
  pen_cmd->add_option("--penalty", f.penalty, "penalty weight q_d (default 1)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve_cmd->parsed()) return cmd_solve(f);
    if (rate_cmd->parsed()) return cmd_local_convergence(f);
    if (ec_cmd->parsed()) return cmd_ec_study(f);
    if (pen_cmd->parsed()) return cmd_penalty_study(f);
  } catch (const ConfigError& e) {
    std::cerr << "config error";
    if (!e.key().empty()) std::cerr << " [" << e.key() << "]";
    std::cerr << ": " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}
