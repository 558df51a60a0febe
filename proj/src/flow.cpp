#include "dnflow/flow.hpp"

#include "dnflow/errors.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <string>

namespace dnflow {

FlowTrajectory evolve(const EnergyOperator& op, const Field& g, double tau, long steps, const EnergyParams& params,
                      const SolverConfig& cfg, const EvolveOptions& opts) {
  params.validate();
  cfg.validate();
  if (steps < 1) throw InvalidParameter("evolve needs at least one step");
  if (!(tau > 0.0)) throw InvalidParameter("time step tau must be positive");
  const auto& d = op.domain();
  check_shape(d, g);
  if (!g.allFinite()) throw InvalidParameter("initial datum must be finite");

  FlowTrajectory traj;
  traj.tau = tau;
  traj.params = params;
  traj.regime = op.regime();
  Field u0 = g;
  if (op.regime().kind == RegimeKind::neumann) {
    u0 = zero_pmean_shift(d, g, op.p());
    traj.projected_initial = u0;
  }
  std::optional<InverseSolver> dual;
  if (opts.dual) dual.emplace(op, params, cfg, opts.warm_start);
  InverseSolver* dual_ptr = dual ? &*dual : nullptr;

  traj.states.reserve(static_cast<std::size_t>(steps) + 1);
  traj.diagnostics.reserve(static_cast<std::size_t>(steps) + 1);
  traj.states.push_back(u0);
  traj.diagnostics.push_back(compute_row(op, params, tau, 0, u0, nullptr, dual_ptr));
  for (long k = 1; k <= steps; ++k) {
    StepResult step;
    try {
      step = implicit_step(op, traj.states.back(), tau, params, cfg);
    } catch (const NonConvergence& e) {
      throw NonConvergence("step " + std::to_string(k) + ": " + e.what(), e.last_iterate(), e.residual(), k);
    }
    // The scheme conserves int J_p(u); solver error would excite the non-decaying
    // constant mode, so Neumann states are put back on the zero-p-mean set.
    if (traj.projected_initial) step.u = zero_pmean_shift(d, step.u, op.p());
    traj.diagnostics.push_back(compute_row(op, params, tau, k, step.u, &traj.diagnostics.back(), dual_ptr));
    traj.states.push_back(std::move(step.u));
    if (opts.stop && opts.stop(traj)) break;
  }
  return traj;
}

namespace {

void check_time(const FlowTrajectory& traj, double t) {
  if (!(t >= 0.0) || t > traj.final_time() * (1.0 + 1e-12))
    throw RangeError("time " + std::to_string(t) + " outside [0, " + std::to_string(traj.final_time()) + "]");
}

}  // namespace

Field interpolant_v(const FlowTrajectory& traj, double t) {
  check_time(traj, t);
  if (t == 0.0) return traj.states.front();
  long k = static_cast<long>(std::ceil(t / traj.tau - 1e-12));
  k = std::clamp(k, 1L, traj.steps());
  return traj.states[k];
}

Field interpolant_w(const FlowTrajectory& traj, double t) {
  check_time(traj, t);
  const double p = traj.params.p;
  long k = static_cast<long>(std::floor(t / traj.tau)) + 1;
  k = std::clamp(k, 1L, traj.steps());
  const double theta = std::clamp((t - (k - 1) * traj.tau) / traj.tau, 0.0, 1.0);
  const Field a = jp(traj.states[k - 1], p);
  const Field b = jp(traj.states[k], p);
  return a + theta * (b - a);
}

std::optional<Field> rescaled_profile(const FlowTrajectory& traj, long k) {
  if (k < 0 || k > traj.steps()) throw RangeError("rescaled_profile step out of range");
  const double p = traj.params.p;
  const double np = traj.diagnostics[k].Np;
  const double np0 = traj.diagnostics[0].Np;
  if (!(np > 0.0) || !(np0 > 0.0)) return std::nullopt;
  const double norm = std::pow(np, 1.0 / p);
  double rescaled = norm;
  if (k >= 1) {
    if (auto rate = lambda_decay_estimate(traj, k); rate && *rate > 0.0)
      rescaled *= std::pow(1.0 + *rate * traj.tau, static_cast<double>(k) / (p - 1.0));
  }
  if (!std::isfinite(rescaled) || rescaled < 1e3 * DBL_EPSILON * std::pow(np0, 1.0 / p)) return std::nullopt;
  return Field(traj.states[k] / norm);
}

LimitResult run_to_limit(const EnergyOperator& op, const Field& g, const EnergyParams& params,
                         const SolverConfig& cfg, const LimitOptions& opts) {
  if (opts.window < 1 || opts.max_steps < 2) throw InvalidParameter("limit options need window >= 1, max_steps >= 2");
  LimitResult res;
  Field start = g;
  double tau = 0.0;
  if (opts.tau) {
    tau = *opts.tau;
  } else {
    EvolveOptions boot;
    boot.dual = false;
    const auto warm = evolve(op, g, opts.bootstrap_tau, opts.bootstrap_steps, params, cfg, boot);
    const auto rate = lambda_decay_estimate(warm, warm.steps());
    if (!rate || !(*rate > 0.0)) {
      res.degenerate = true;
      res.trajectory = warm;
      return res;
    }
    tau = 1.0 / (2.0 * *rate);
    start = warm.states.back();
  }
  res.tau = tau;

  long settled = 0;
  EvolveOptions main;
  main.dual = false;
  main.stop = [&](const FlowTrajectory& traj) {
    const long k = traj.steps();
    if (k < 2) return false;
    const auto a = lambda_decay_estimate(traj, k - 1);
    const auto b = lambda_decay_estimate(traj, k);
    if (!a || !b || !rescaled_profile(traj, k)) return true;
    settled = std::abs(*b - *a) <= opts.rel_tol * std::abs(*b) ? settled + 1 : 0;
    return settled >= opts.window;
  };
  res.trajectory = evolve(op, start, tau, opts.max_steps, params, cfg, main);
  const auto& traj = res.trajectory;
  const long k = traj.steps();
  res.steps = k;
  res.converged = settled >= opts.window;
  const auto profile = rescaled_profile(traj, k);
  const auto previous = rescaled_profile(traj, k - 1);
  const auto rate = lambda_decay_estimate(traj, k);
  if (!profile || !previous || !rate) {
    res.degenerate = true;
    res.converged = false;
    return res;
  }
  res.lambda = *rate;
  res.profile = *profile;
  res.profile_gap = lp_norm(op.domain(), *profile - *previous, op.p());
  res.rayleigh = traj.diagnostics[k].rayleigh;
  res.mu = dual_quotient(op, traj.states[k], params, cfg);
  return res;
}

}  // namespace dnflow
