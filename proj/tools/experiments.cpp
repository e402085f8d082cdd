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

#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "msddp/backward_sweep.hpp"
#include "msddp/derivatives.hpp"
#include "msddp/rollout.hpp"

namespace msddp::experiments {

void check_config_keys(const KeyValueFile& kv) {
  std::set<std::string> known = solver_config_keys();
  known.insert(problem_config_keys().begin(), problem_config_keys().end());
  kv.require_known(known, problem_config_prefixes());
}

BenchmarkProblem build_problem(const RunSettings& s) {
  check_config_keys(s.config);
  KeyValueFile kv = s.config;
  if (s.segments) kv.set("segments", std::to_string(*s.segments));
  return make_problem(s.problem, kv, s.seed);
}

SolverConfig build_solver_config(const RunSettings& s, std::string_view default_preset) {
  const std::string name =
      s.preset ? *s.preset : s.config.get_string("preset", std::string(default_preset));
  SolverConfig c = solver_config_from(s.config, preset(name));
  if (s.preset && s.config.contains("preset")) {
    // The flag wins over the file's preset; re-apply the file's explicit keys.
    KeyValueFile rest;
    for (const auto& [k, v] : s.config.entries()) {
      if (k != "preset") rest.set(k, v);
    }
    c = solver_config_from(rest, preset(name));
  }
  if (s.penalty) {
    if (!(*s.penalty >= 0.0)) throw ConfigError("penalty", "penalty weight must be nonnegative");
    c.penalty = *s.penalty;
  }
  return c;
}

ShootingPlan build_plan(const RunSettings&, const BenchmarkProblem& p) {
  try {
    return ShootingPlan::even(p.ocp.horizon, p.default_segments);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("segments", e.what());
  }
}

SolveOutcome run_solve(const RunSettings& s) {
  SolveOutcome out;
  out.problem = build_problem(s);
  out.config = build_solver_config(s, "msddp-nonlinear");
  const bool explicit_segments = s.segments || s.config.contains("segments");
  out.plan = !out.config.variant.multiple_shooting && !explicit_segments
                 ? ShootingPlan::single(out.problem.ocp.horizon)
                 : build_plan(s, out.problem);
  out.result = solve(out.problem.ocp, out.plan, out.problem.initial_guess, out.config);
  return out;
}

// ---------------------------------------------------------------------------
// Local convergence

namespace {

// Full unregularized steps from a converged iterate. Near the optimum the
// remaining cost decrease falls below the resolution of the line search.
Trajectory polish(const OcpDefinition& ocp, const ShootingPlan& plan, Trajectory traj,
                  const SolverConfig& config, int steps) {
  SweepOptions opts;
  opts.variant = config.variant;
  const ExpansionOrder order = config.variant.expansion_order();
  for (int i = 0; i < steps; ++i) {
    const LocalModel local = expand(traj, ocp, order, config.tensor_step);
    const BackwardPassResult sweep = backward_sweep(local, traj, plan, opts);
    if (sweep.policy.feedforward_inf_norm() == 0.0) break;
    traj = nonlinear_rollout(traj, sweep.policy, ocp, 1.0);
  }
  return traj;
}

}  // namespace

LocalConvergenceResult run_local_convergence(const RunSettings& s,
                                             const LocalConvergenceOptions& opts) {
  RunSettings rs = s;
  rs.segments = opts.segments;
  const BenchmarkProblem problem = build_problem(rs);
  const ShootingPlan plan = build_plan(rs, problem);

  SolverConfig tight = build_solver_config(rs, "msddp-nonlinear");
  tight.cost_tol = 1e-14;
  tight.feedforward_tol = 1e-13;
  tight.max_iterations = std::max(tight.max_iterations, 500);
  const SolveResult rough = solve(problem.ocp, plan, problem.initial_guess, tight);

  const Trajectory opt = polish(problem.ocp, plan, rough.trajectory, tight, 10);

  LocalConvergenceResult out;
  out.optimum = opt;
  out.optimum_status = rough.status;

  RateOptions ro;
  ro.samples = opts.samples;
  ro.radius = opts.radius;
  ro.seed = opts.seed;
  for (SweepVariant variant : {SweepVariant::ms_ddp(), SweepVariant::ms_ilqr()}) {
    for (RolloutKind rollout : {RolloutKind::kNonlinear, RolloutKind::kHybrid}) {
      SolverConfig c = build_solver_config(rs, "msddp-nonlinear");
      c.variant = variant;
      c.rollout = rollout;
      for (RateFit& fit : measure_local_rate(problem.ocp, plan, out.optimum, ro, c)) {
        out.rows.push_back({to_string(variant), to_string(rollout), std::move(fit)});
      }
    }
  }
  return out;
}

namespace {

double median_of(const std::vector<RateRow>& rows, const std::string& variant,
                 const std::string& rollout, double RateFit::*field) {
  std::vector<double> values;
  for (const RateRow& r : rows) {
    if (r.variant == variant && r.rollout == rollout && r.fit.usable) {
      values.push_back(r.fit.*field);
    }
  }
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t h = values.size() / 2;
  return values.size() % 2 ? values[h] : 0.5 * (values[h - 1] + values[h]);
}

}  // namespace

double median_epsilon(const std::vector<RateRow>& rows, const std::string& variant,
                      const std::string& rollout) {
  return median_of(rows, variant, rollout, &RateFit::epsilon);
}

double median_kappa(const std::vector<RateRow>& rows, const std::string& variant,
                    const std::string& rollout) {
  return median_of(rows, variant, rollout, &RateFit::kappa);
}

int usable_count(const std::vector<RateRow>& rows, const std::string& variant,
                 const std::string& rollout) {
  return static_cast<int>(std::count_if(rows.begin(), rows.end(), [&](const RateRow& r) {
    return r.variant == variant && r.rollout == rollout && r.fit.usable;
  }));
}

void write_rate_csv(std::ostream& out, const std::vector<RateRow>& rows) {
  out << "variant,rollout,sample,usable,points,kappa,epsilon\n";
  for (const RateRow& r : rows) {
    out << r.variant << ',' << r.rollout << ',' << r.fit.sample << ',' << (r.fit.usable ? 1 : 0)
        << ',' << r.fit.points << ',' << format_number(r.fit.kappa) << ','
        << format_number(r.fit.epsilon) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Expected cost change study

EcStudyResult run_ec_study(const RunSettings& s, int probe_iterations) {
  RunSettings rs = s;
  rs.problem = "acrobot";
  const BenchmarkProblem problem = build_problem(rs);
  const ShootingPlan plan = build_plan(rs, problem);

  EcStudyResult out;
  for (const char* name : {"filqr", "filqr-exact", "msilqr-exact"}) {
    rs.preset = name;
    const SolverConfig c = build_solver_config(rs, name);
    out.histories.push_back({name, solve(problem.ocp, plan, problem.initial_guess, c)});
  }

  rs.preset = "filqr-exact";
  SolverConfig probe = build_solver_config(rs, "filqr-exact");
  probe.max_iterations = std::numeric_limits<int>::max();
  Trajectory iterate = measure_defects(problem.initial_guess, plan, problem.ocp);
  int accepted = 0;
  if (probe_iterations > 0) {
    const IterateObserver stop_after = [&](int iteration, const Trajectory& traj) {
      iterate = traj;
      if (iteration > 0) ++accepted;
      return accepted < probe_iterations;
    };
    solve(problem.ocp, plan, problem.initial_guess, probe, stop_after);
  }
  out.probe_iteration = accepted;

  const LocalModel local = expand(iterate, problem.ocp, ExpansionOrder::kFirst);
  SweepOptions so;
  so.variant = SweepVariant::ms_ilqr();
  BackwardPassResult sweep;
  for (double lambda = 0.0;; lambda = std::max(1e-9, lambda * 10.0)) {
    so.regularization = lambda;
    try {
      sweep = backward_sweep(local, iterate, plan, so);
      break;
    } catch (const NotPositiveDefinite&) {
      if (lambda > 1e10) throw;
    }
  }
  const ExpectedCostCoefficients exact = expected_cost_coefficients(sweep.policy, local, iterate);
  const ExpectedCostCoefficients approx = sweep.approximate_ec;
  const double cost0 = total_cost(iterate, problem.ocp);

  for (int i = 0; i <= 20; ++i) {
    const double alpha = 0.05 * i;
    double actual = 0.0;
    if (i > 0) {
      try {
        actual = total_cost(nonlinear_rollout(iterate, sweep.policy, problem.ocp, alpha),
                            problem.ocp) -
                 cost0;
      } catch (const DivergenceError&) {
        actual = std::numeric_limits<double>::quiet_NaN();
      }
    }
    out.samples.push_back({"exact", alpha, exact.at(alpha), actual});
    out.samples.push_back({"approximate", alpha, approx.at(alpha), actual});
  }
  return out;
}

void write_ec_history_csv(std::ostream& out, const std::vector<EcHistory>& histories) {
  out << "preset,status,iter,cost,defect,merit,mu,alpha,lambda,ec1,ec2,wall_ms\n";
  for (const EcHistory& h : histories) {
    std::ostringstream rows;
    write_history_csv(rows, h.result.history);
    std::istringstream lines(rows.str());
    std::string line;
    std::getline(lines, line);  // header
    while (std::getline(lines, line)) {
      out << h.preset << ',' << to_string(h.result.status) << ',' << line << '\n';
    }
  }
}

void write_ec_alpha_csv(std::ostream& out, const std::vector<EcSample>& samples) {
  out << "model,alpha,expected,actual\n";
  for (const EcSample& s : samples) {
    out << s.model << ',' << format_number(s.alpha) << ',' << format_number(s.expected) << ','
        << format_number(s.actual) << '\n';
  }
}

double secant_slope_mismatch(const std::vector<EcSample>& samples, const std::string& model,
                             double alpha) {
  for (const EcSample& s : samples) {
    if (s.model == model && std::abs(s.alpha - alpha) < 1e-12) {
      const double expected_slope = s.expected / alpha;
      const double actual_slope = s.actual / alpha;
      return std::abs(expected_slope - actual_slope) / std::abs(actual_slope);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

// ---------------------------------------------------------------------------
// Penalty study

std::vector<PenaltyRow> run_penalty_study(const RunSettings& s, const std::vector<int>& segments,
                                          double penalty) {
  RunSettings rs = s;
  if (!rs.config.contains("horizon")) rs.config.set("horizon", "193");
  rs.penalty.reset();

  std::vector<PenaltyRow> rows;
  for (int M : segments) {
    rs.segments = M;
    BenchmarkProblem problem = build_problem(rs);
    const int N = problem.ocp.horizon;
    if (M < 1 || M > N || (M != N && M != 1 && (N - 1) % M != 0)) {
      PenaltyRow skip;
      skip.problem = rs.problem;
      skip.segments = M;
      skip.status = "skipped";
      skip.note = "segments must divide horizon-1 (" + std::to_string(N - 1) + ")";
      rows.push_back(skip);
      continue;
    }
    const ShootingPlan plan = build_plan(rs, problem);
    for (double qd : {0.0, penalty}) {
      SolverConfig c = build_solver_config(rs, "msilqr-hybrid");
      c.penalty = qd;
      const SolveResult r = solve(problem.ocp, plan, problem.initial_guess, c);
      PenaltyRow row;
      row.problem = rs.problem;
      row.segments = M;
      row.penalty = qd;
      row.status = to_string(r.status);
      row.iterations = r.iterations;
      row.cost = r.cost;
      double sum = 0.0;
      for (const IterationRecord& h : r.history) sum += h.alpha;
      row.mean_alpha = r.accepted_iterations > 0 ? sum / r.accepted_iterations : 0.0;
      rows.push_back(row);
    }
  }
  return rows;
}

void write_penalty_csv(std::ostream& out, const std::vector<PenaltyRow>& rows) {
  out << "problem,segments,penalty,status,iterations,cost,mean_alpha,note\n";
  for (const PenaltyRow& r : rows) {
    out << r.problem << ',' << r.segments << ',' << format_number(r.penalty) << ',' << r.status
        << ',' << r.iterations << ',' << format_number(r.cost) << ','
        << format_number(r.mean_alpha) << ',' << r.note << '\n';
  }
}

void write_file(const std::filesystem::path& dir, const std::string& name,
                const std::string& text) {
  std::filesystem::create_directories(dir);
  std::ofstream f(dir / name, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
  f << text;
}

}  // namespace msddp::experiments
