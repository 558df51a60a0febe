#pragma once

#include "dnflow/diagnostics.hpp"
#include "dnflow/elliptic.hpp"
#include "dnflow/trajectory.hpp"

#include <functional>
#include <optional>

namespace dnflow {

struct EvolveOptions {
  /// Compute dual quotients (one inverse solve per step).
  bool dual = true;
  /// Warm-start the dual solves along the trajectory.
  bool warm_start = true;
  /// Called after every step; returning true ends the run early.
  std::function<bool(const FlowTrajectory&)> stop;
};

/// Runs u^k = implicit_step(u^{k-1}) for k = 1..steps from u^0 = g (zero-p-mean
/// projected for Neumann), recording one diagnostics row per state.
/// Solver failures are rethrown as NonConvergence carrying the step index.
FlowTrajectory evolve(const EnergyOperator& op, const Field& g, double tau, long steps, const EnergyParams& params,
                      const SolverConfig& cfg, const EvolveOptions& opts = {});

/// Piecewise-constant interpolant: g at t = 0, u^k on ((k-1) tau, k tau].
Field interpolant_v(const FlowTrajectory& traj, double t);

/// Piecewise-linear interpolant of J_p(u^k) in time.
Field interpolant_w(const FlowTrajectory& traj, double t);

/// u^k / ||u^k||_p, or nullopt when the rescaled solution has degenerated to zero:
/// ||u^k||_p (1 + lambda_k tau)^{k/(p-1)} < 1e3 * machine epsilon * ||u^0||_p, with
/// lambda_k the current decay-rate estimate.
std::optional<Field> rescaled_profile(const FlowTrajectory& traj, long k);

struct LimitOptions {
  /// Fixed step; when unset, tau = 1 / (2 lambda) from a bootstrap run.
  std::optional<double> tau;
  long bootstrap_steps = 10;
  double bootstrap_tau = 0.1;
  /// Stop once the decay-rate estimate changes by less than rel_tol (relative)
  /// on `window` consecutive steps.
  double rel_tol = 1e-8;
  long window = 10;
  long max_steps = 5000;
};

struct LimitResult {
  double lambda = 0.0;  ///< decay-rate estimate at the last step
  double mu = 0.0;      ///< dual quotient at the last step
  double rayleigh = 0.0;
  Field profile;        ///< L^p-normalized last state
  double profile_gap = 0.0;  ///< L^p distance between the last two normalized states
  long steps = 0;
  double tau = 0.0;
  bool degenerate = false;
  bool converged = false;
  FlowTrajectory trajectory;  ///< the main run (after the bootstrap)
};

/// Flows until the decay-rate estimate settles and reads off lambda, mu and the
/// limiting profile.
LimitResult run_to_limit(const EnergyOperator& op, const Field& g, const EnergyParams& params,
                         const SolverConfig& cfg, const LimitOptions& opts = {});

}  // namespace dnflow
