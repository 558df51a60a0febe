#pragma once

#include "dnflow/flow.hpp"
#include "dnflow/oracle.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace dnflow {

/// Outcome of one sampled property. `worst` is the largest normalized violation
/// (or deviation) observed and `limit` the allowed value; passed == worst <= limit.
struct CheckResult {
  std::string name;
  bool passed = true;
  double worst = 0.0;
  double limit = 0.0;
  long samples = 0;
  std::string detail;
};

CheckResult make_check(std::string name, double worst, double limit, long samples, std::string detail = {});

/// Monotone quantities along a trajectory, each normalized by the natural scale of
/// the quantity at step k-1 and compared with slack * grad_tol:
///   lp_decay, scaled_decay (oracle lambda_h), energy_monotone, convexity_trend,
///   decay_bound, energy_identity, and neumann_conservation for Neumann runs.
std::vector<CheckResult> check_trajectory(const FlowTrajectory& traj, double lambda_h, double grad_tol,
                                          double slack = 10.0);

/// Max over k <= steps of ||u^k - (1 + lambda tau)^{-k/(p-1)} phi||_inf / ||.||_inf for g = phi.
CheckResult check_separation(const EnergyOperator& op, const EigenResult& eig, double tau, long steps,
                             const EnergyParams& params, const SolverConfig& cfg, double limit);

/// u^k >= (1 + lambda tau)^{-k/(p-1)} a phi - slack * grad_tol at every node, with
/// a = min_i g_i / phi_i so that g >= a phi.
CheckResult check_comparison(const FlowTrajectory& traj, const EigenResult& eig, double grad_tol,
                             double slack = 10.0);

/// Every node of the profile has the sign of its largest entry.
CheckResult check_sign_definite(const Field& profile);

/// Dual Poincare suite on `samples` random fields (zero-mean for Neumann):
///   dual_inequality, equality_gap, nonextremal_gap, and for Neumann the
///   triangle and minkowski inequalities of the dual norm on random pairs.
std::vector<CheckResult> check_dual(const EnergyOperator& op, const EnergyParams& params, const SolverConfig& cfg,
                                    const EigenResult& eig, long samples, std::uint64_t seed);

/// Evolves g over the same horizon with tau0, tau0/2, ... (levels values) and checks
/// that the largest positive per-step increment of the dual quotient and of the
/// Rayleigh quotient shrinks by at least `factor` per halving, or is already below
/// the noise floor slack * grad_tol * max |quotient|.
std::vector<CheckResult> check_quotient_refinement(const EnergyOperator& op, const Field& g, const EnergyParams& params,
                                                   const SolverConfig& cfg, double tau0, long steps0, int levels = 3,
                                                   double factor = 1.5, double slack = 10.0);

/// Analytic gradient density against central differences of the energy on
/// `samples` random fields; worst relative l2 error.
CheckResult check_gradient(const EnergyOperator& op, const EnergyParams& params, long samples, std::uint64_t seed,
                           double limit = 1e-6);

/// Random field with entries uniform in [-1, 1) mixed with a few smooth modes;
/// zero-mean when zero_mean is set.
Field random_field(const Domain& d, std::uint64_t seed, bool zero_mean = false);

struct SuiteOptions {
  long steps = 200;
  long samples = 200;
  /// Step as a fraction of 1 / lambda_h.
  double tau_fraction = 0.05;
  std::uint64_t seed = 1;
};

/// Every invariant applicable to the regime of op, on one oracle eigenpair. The
/// initial datum is g == 1 (a ramp for Neumann).
std::vector<CheckResult> run_invariant_suite(const EnergyOperator& op, const EnergyParams& params,
                                             const SolverConfig& cfg, const EigenResult& eig,
                                             const SuiteOptions& opts);

/// g == 1, or the first coordinate for Neumann (constants project to zero there).
Field canonical_initial(const EnergyOperator& op);

}  // namespace dnflow
