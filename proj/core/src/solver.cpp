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

#include "msddp/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>
#include <thread>

namespace msddp {

ExpectationModel parse_expectation(std::string_view name) {
  if (name == "exact") return ExpectationModel::kExact;
  if (name == "approximate") return ExpectationModel::kApproximate;
  throw std::invalid_argument("unknown expectation model '" + std::string(name) + "'");
}

std::string to_string(ExpectationModel model) {
  return model == ExpectationModel::kExact ? "exact" : "approximate";
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kConverged:
      return "converged";
    case SolveStatus::kStalled:
      return "stalled";
    case SolveStatus::kMaxIterations:
      return "max-iterations";
    case SolveStatus::kStopped:
      return "stopped";
  }
  return "?";
}

void SolverConfig::validate() const {
  if (!(cost_tol > 0.0) || !(defect_tol > 0.0)) {
    throw std::invalid_argument("convergence tolerances must be positive");
  }
  if (max_iterations < 0) throw std::invalid_argument("max_iterations must be nonnegative");
  if (!(penalty >= 0.0)) throw std::invalid_argument("penalty weight must be nonnegative");
  if (!(merit.rho > 0.0 && merit.rho < 1.0)) throw std::invalid_argument("rho must lie in (0, 1)");
  if (!(merit.mu0 > 0.0) || !(merit.kappa_d > 0.0)) {
    throw std::invalid_argument("mu0 and kappa_d must be positive");
  }
  if (!(merit.gamma >= 0.0 && merit.gamma < 1.0)) {
    throw std::invalid_argument("gamma must lie in [0, 1)");
  }
  if (!(merit.norm_order >= 1.0)) throw std::invalid_argument("norm order must be >= 1");
  if (!(regularization.factor > 1.0) || !(regularization.min > 0.0) ||
      !(regularization.max > regularization.min) || regularization.initial < 0.0) {
    throw std::invalid_argument("invalid regularization schedule");
  }
  if (!(tensor_step > 0.0)) throw std::invalid_argument("tensor step must be positive");
}

// ---------------------------------------------------------------------------
// Configuration

const std::set<std::string>& solver_config_keys() {
  static const std::set<std::string> keys = {
      "preset",        "variant",         "rollout",
      "merit",         "expectation",     "penalty",
      "norm_order",    "rho",             "mu0",
      "kappa_d",       "gamma",           "mu_constant",
      "increase_factor", "lambda_init",   "lambda_min",
      "lambda_factor", "lambda_max",      "lambda_line_search_floor",
      "lambda_increase_step", "lambda_decrease_step",
      "max_iterations", "cost_tol",       "defect_tol",
      "feedforward_tol", "tensor_step",
  };
  return keys;
}

namespace {

template <typename Parse>
auto parse_enum(const KeyValueFile& kv, const std::string& key, Parse parse,
                decltype(parse(std::string_view{})) fallback) {
  if (!kv.contains(key)) return fallback;
  try {
    return parse(kv.get_string(key, ""));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(key, key + ": " + e.what());
  }
}

}  // namespace

SolverConfig solver_config_from(const KeyValueFile& kv, SolverConfig base) {
  SolverConfig c = kv.contains("preset") ? preset(kv.get_string("preset", "")) : std::move(base);
  c.variant = parse_enum(kv, "variant", parse_variant, c.variant);
  c.rollout = parse_enum(kv, "rollout", parse_rollout, c.rollout);
  c.merit.mode = parse_enum(kv, "merit", parse_merit_mode, c.merit.mode);
  c.expectation = parse_enum(kv, "expectation", parse_expectation, c.expectation);
  c.penalty = kv.get_double("penalty", c.penalty);
  c.merit.norm_order = kv.get_double("norm_order", c.merit.norm_order);
  c.merit.rho = kv.get_double("rho", c.merit.rho);
  c.merit.mu0 = kv.get_double("mu0", c.merit.mu0);
  c.merit.kappa_d = kv.get_double("kappa_d", c.merit.kappa_d);
  c.merit.gamma = kv.get_double("gamma", c.merit.gamma);
  c.merit.mu_constant = kv.get_double("mu_constant", c.merit.mu_constant);
  c.merit.increase_factor = kv.get_double("increase_factor", c.merit.increase_factor);
  c.regularization.initial = kv.get_double("lambda_init", c.regularization.initial);
  c.regularization.min = kv.get_double("lambda_min", c.regularization.min);
  c.regularization.factor = kv.get_double("lambda_factor", c.regularization.factor);
  c.regularization.max = kv.get_double("lambda_max", c.regularization.max);
  c.regularization.line_search_floor =
      kv.get_double("lambda_line_search_floor", c.regularization.line_search_floor);
  c.regularization.increase_step =
      kv.get_double("lambda_increase_step", c.regularization.increase_step);
  c.regularization.decrease_step =
      kv.get_double("lambda_decrease_step", c.regularization.decrease_step);
  c.max_iterations = kv.get_int("max_iterations", c.max_iterations);
  c.cost_tol = kv.get_double("cost_tol", c.cost_tol);
  c.defect_tol = kv.get_double("defect_tol", c.defect_tol);
  c.feedforward_tol = kv.get_double("feedforward_tol", c.feedforward_tol);
  c.tensor_step = kv.get_double("tensor_step", c.tensor_step);
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("", e.what());
  }
  return c;
}

namespace {

struct PresetEntry {
  const char* name;
  SweepVariant variant;
  RolloutKind rollout;
  MeritMode merit;
  ExpectationModel expectation;
};

constexpr PresetEntry kPresets[] = {
    {"msddp-nonlinear", SweepVariant::ms_ddp(), RolloutKind::kNonlinear, MeritMode::kAdaptive,
     ExpectationModel::kExact},
    {"msddp-hybrid", SweepVariant::ms_ddp(), RolloutKind::kHybrid, MeritMode::kAdaptive,
     ExpectationModel::kExact},
    {"msilqr-nonlinear", SweepVariant::ms_ilqr(), RolloutKind::kNonlinear, MeritMode::kAdaptive,
     ExpectationModel::kExact},
    {"msilqr-hybrid", SweepVariant::ms_ilqr(), RolloutKind::kHybrid, MeritMode::kAdaptive,
     ExpectationModel::kExact},
    {"msilqr-exact", SweepVariant::ms_ilqr(), RolloutKind::kNonlinear, MeritMode::kAdaptive,
     ExpectationModel::kExact},
    {"filqr", SweepVariant::ms_ilqr(), RolloutKind::kNonlinear, MeritMode::kCostOnly,
     ExpectationModel::kApproximate},
    {"filqr-exact", SweepVariant::ms_ilqr(), RolloutKind::kNonlinear, MeritMode::kCostOnly,
     ExpectationModel::kExact},
    {"ssddp", SweepVariant::ss_ddp(), RolloutKind::kNonlinear, MeritMode::kAdaptive,
     ExpectationModel::kExact},
    {"ssilqr", SweepVariant::ss_ilqr(), RolloutKind::kNonlinear, MeritMode::kAdaptive,
     ExpectationModel::kExact},
};

}  // namespace

SolverConfig preset(std::string_view name) {
  for (const PresetEntry& p : kPresets) {
    if (name == p.name) {
      SolverConfig c;
      c.variant = p.variant;
      c.rollout = p.rollout;
      c.merit.mode = p.merit;
      c.expectation = p.expectation;
      return c;
    }
  }
  throw ConfigError("preset", "unknown preset '" + std::string(name) + "'");
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const PresetEntry& p : kPresets) names.emplace_back(p.name);
  return names;
}

// ---------------------------------------------------------------------------
// Outer loop

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

double initial_mu(const MeritOptions& opts) {
  switch (opts.mode) {
    case MeritMode::kAdaptive:
      return opts.mu0;
    case MeritMode::kConstant:
      return opts.mu_constant;
    case MeritMode::kCostOnly:
      return 0.0;
  }
  return 0.0;
}

}  // namespace

SolveResult solve(const OcpDefinition& ocp, const ShootingPlan& plan, const Trajectory& initial,
                  const SolverConfig& config, const IterateObserver& observer) {
  config.validate();
  ocp.validate();
  if (plan.horizon() != ocp.horizon) throw DimensionError("solve: plan horizon mismatch");
  if (!config.variant.multiple_shooting && !plan.is_single_shooting()) {
    throw std::invalid_argument("single-shooting variants require a single-shooting plan");
  }
  if (!initial.all_finite()) throw std::invalid_argument("initial trajectory is not finite");
  initial.check_dimensions(ocp.horizon, ocp.state_dim(), ocp.control_dim());

  const double p = config.merit.norm_order;
  const RegularizationSchedule& reg = config.regularization;
  const ExpansionOrder order = config.variant.expansion_order();

  SolveResult result;
  Trajectory traj = measure_defects(initial, plan, ocp);
  double cost = 0.0;
  try {
    cost = total_cost(traj, ocp);
  } catch (const DivergenceError&) {
    throw std::invalid_argument("initial trajectory has a non-finite cost");
  }
  double defect = total_defect_norm(traj, p);
  double mu = initial_mu(config.merit);
  double lambda = reg.initial;

  SweepOptions sweep_opts;
  sweep_opts.variant = config.variant;
  if (config.penalty > 0.0) {
    sweep_opts.penalty = config.penalty * MatrixXd::Identity(ocp.state_dim(), ocp.state_dim());
  }

  IterationRecord first;
  first.cost = cost;
  first.defect = defect;
  first.merit = cost + mu * defect;
  first.mu = mu;
  first.lambda = lambda;
  result.history.push_back(first);

  auto finish = [&](SolveStatus status) {
    result.status = status;
    result.cost = cost;
    result.defect = defect;
    result.trajectory = std::move(traj);
    return std::move(result);
  };

  if (observer && !observer(0, traj)) return finish(SolveStatus::kStopped);

  for (int iter = 1; iter <= config.max_iterations; ++iter) {
    const Clock::time_point start = Clock::now();
    result.iterations = iter;

    const LocalModel local = expand(traj, ocp, order, config.tensor_step);

    BackwardPassResult sweep;
    bool factored = false;
    while (!factored) {
      sweep_opts.regularization = lambda;
      try {
        sweep = backward_sweep(local, traj, plan, sweep_opts);
        factored = true;
      } catch (const NotPositiveDefinite&) {
        lambda = std::max(reg.min, lambda * reg.factor);
        if (lambda > reg.max) break;
      }
    }

    IterationRecord rec;
    rec.iteration = iter;
    rec.cost = cost;
    rec.defect = defect;
    rec.lambda = lambda;
    if (!factored) {
      rec.mu = mu;
      rec.merit = cost + mu * defect;
      rec.wall_ms = elapsed_ms(start);
      result.history.push_back(rec);
      return finish(SolveStatus::kStalled);
    }

    const ExpectedCostCoefficients ec =
        config.expectation == ExpectationModel::kExact
            ? expected_cost_coefficients(sweep.policy, local, traj)
            : sweep.approximate_ec;
    if (config.merit.mode == MeritMode::kAdaptive) {
      mu = update_mu(mu, ec.at(1.0), defect, config.merit);
    }
    rec.mu = mu;
    rec.ec1 = ec.first;
    rec.ec2 = ec.second;
    rec.merit = cost + mu * defect;

    // Already at a stationary point: nothing left to step along.
    if (sweep.policy.feedforward_inf_norm() <= config.feedforward_tol &&
        defect < config.defect_tol) {
      rec.wall_ms = elapsed_ms(start);
      result.history.push_back(rec);
      return finish(SolveStatus::kConverged);
    }

    LineSearchInput in{traj, sweep.policy, local, plan, ocp, ec, mu, cost, defect};
    LineSearchResult ls = line_search(in, config.merit, config.rollout);

    if (!ls.accepted) {
      const bool negligible = std::abs(ec.first) <= config.cost_tol * std::max(1.0, std::abs(cost));
      rec.wall_ms = elapsed_ms(start);
      if (negligible && defect < config.defect_tol) {
        result.history.push_back(rec);
        return finish(SolveStatus::kConverged);
      }
      lambda = std::max(lambda * reg.factor, reg.line_search_floor);
      rec.lambda = lambda;
      result.history.push_back(rec);
      if (lambda > reg.max) return finish(SolveStatus::kStalled);
      continue;
    }

    const double change = std::abs(cost - ls.cost) / std::max(1.0, std::abs(cost));
    traj = std::move(ls.trajectory);
    cost = ls.cost;
    defect = ls.defect_norm;
    ++result.accepted_iterations;

    if (ls.alpha <= reg.increase_step) {
      lambda = std::min(reg.max, std::max(reg.min, lambda * reg.factor));
    } else if (ls.alpha >= reg.decrease_step) {
      lambda /= reg.factor;
      if (lambda < reg.min) lambda = 0.0;
    }

    rec.cost = cost;
    rec.defect = defect;
    rec.merit = ls.merit;
    rec.alpha = ls.alpha;
    rec.wall_ms = elapsed_ms(start);
    result.history.push_back(rec);

    if (observer && !observer(iter, traj)) return finish(SolveStatus::kStopped);
    if (change < config.cost_tol && defect < config.defect_tol) {
      return finish(SolveStatus::kConverged);
    }
  }
  return finish(SolveStatus::kMaxIterations);
}

void write_history_csv(std::ostream& out, const std::vector<IterationRecord>& history) {
  out << "iter,cost,defect,merit,mu,alpha,lambda,ec1,ec2,wall_ms\n";
  for (const IterationRecord& r : history) {
    out << r.iteration << ',' << format_number(r.cost) << ',' << format_number(r.defect) << ','
        << format_number(r.merit) << ',' << format_number(r.mu) << ','
        << format_number(r.alpha) << ',' << format_number(r.lambda) << ','
        << format_number(r.ec1) << ',' << format_number(r.ec2) << ','
        << format_number(r.wall_ms) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Local convergence rate

double iterate_error(const Trajectory& traj, const Trajectory& optimum) {
  if (traj.horizon() != optimum.horizon()) throw DimensionError("iterate_error: horizon mismatch");
  double sq = 0.0;
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    sq += (traj.states[k] - optimum.states[k]).squaredNorm();
  }
  for (std::size_t k = 0; k < traj.controls.size(); ++k) {
    sq += (traj.controls[k] - optimum.controls[k]).squaredNorm();
  }
  return std::sqrt(sq);
}

RateFit fit_rate(const std::vector<double>& errors, double fit_low, double fit_high) {
  RateFit fit;
  fit.errors = errors;
  auto inside = [&](double e) { return e > fit_low && e < fit_high; };
  fit.points = static_cast<int>(std::count_if(errors.begin(), errors.end(), inside));
  if (fit.points < 3) return fit;

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int pairs = 0;
  for (std::size_t j = 0; j + 1 < errors.size(); ++j) {
    if (!inside(errors[j]) || !inside(errors[j + 1])) continue;
    const double x = std::log(errors[j]);
    const double y = std::log(errors[j + 1]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++pairs;
  }
  const double denom = pairs * sxx - sx * sx;
  if (pairs < 2 || !(std::abs(denom) > 0.0)) return fit;
  fit.epsilon = (pairs * sxy - sx * sy) / denom;
  fit.kappa = std::exp((sy - fit.epsilon * sx) / pairs);
  fit.usable = std::isfinite(fit.epsilon) && std::isfinite(fit.kappa);
  return fit;
}

namespace {

RateFit run_rate_sample(const OcpDefinition& ocp, const ShootingPlan& plan,
                        const Trajectory& optimum, const RateOptions& opts,
                        const SolverConfig& config, int sample) {
  std::seed_seq seq{opts.seed, static_cast<std::uint64_t>(sample)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit;

  // Uniform in the ball of the stacked shooting states.
  const std::vector<int> nodes = plan.shooting_indices();
  std::vector<VectorXd> direction;
  double norm_sq = 0.0;
  for (int j : nodes) {
    VectorXd v(optimum.states[j].size());
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = normal(rng);
    norm_sq += v.squaredNorm();
    direction.push_back(std::move(v));
  }
  Trajectory guess = optimum;
  if (norm_sq > 0.0) {
    const double dim = static_cast<double>(nodes.size() * optimum.state_dim());
    const double scale = opts.radius * std::pow(unit(rng), 1.0 / dim) / std::sqrt(norm_sq);
    for (std::size_t i = 0; i < nodes.size(); ++i) guess.states[nodes[i]] += scale * direction[i];
  }

  std::vector<double> errors;
  const IterateObserver record = [&](int, const Trajectory& traj) {
    errors.push_back(iterate_error(traj, optimum));
    return errors.back() > opts.fit_low;
  };
  try {
    solve(ocp, plan, guess, config, record);
  } catch (const std::exception&) {
    // A failed solve leaves the errors gathered so far; the fit flags it.
  }
  RateFit fit = fit_rate(errors, opts.fit_low, opts.fit_high);
  fit.sample = sample;
  return fit;
}

}  // namespace

std::vector<RateFit> measure_local_rate(const OcpDefinition& ocp, const ShootingPlan& plan,
                                        const Trajectory& optimum, const RateOptions& opts,
                                        const SolverConfig& config) {
  if (opts.samples < 0) throw std::invalid_argument("sample count must be nonnegative");
  SolverConfig run = config;
  run.max_iterations = opts.max_iterations;
  run.cost_tol = std::numeric_limits<double>::min();
  run.feedforward_tol = 0.0;

  std::vector<RateFit> fits(opts.samples);
  if (opts.radius == 0.0) {
    for (int s = 0; s < opts.samples; ++s) fits[s].sample = s;
    return fits;
  }

  const int workers =
      std::max(1, std::min<int>(opts.samples, static_cast<int>(std::thread::hardware_concurrency())));
  std::vector<std::future<void>> jobs;
  for (int w = 0; w < workers; ++w) {
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (int s = w; s < opts.samples; s += workers) {
        fits[s] = run_rate_sample(ocp, plan, optimum, opts, run, s);
      }
    }));
  }
  for (auto& job : jobs) job.get();
  return fits;
}

}  // namespace msddp
