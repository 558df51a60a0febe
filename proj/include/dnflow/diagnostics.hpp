#pragma once

#include "dnflow/elliptic.hpp"
#include "dnflow/trajectory.hpp"

#include <iosfwd>
#include <optional>

namespace dnflow {

/// ||f||_*^q = q (<f, u> - E(u)) = -q min_v (E(v) - <f, v>), u the regime's inverse of f.
/// Equals <f, u> when the energy is unregularized.
double dual_norm_q(const EnergyOperator& op, const Field& f, const EnergyParams& params, const SolverConfig& cfg);
double dual_norm_q(InverseSolver& solver, const Field& f);

/// int |u|^p / ||J_p u||_*^q. Bounded below by mu = lambda^{1/(p-1)}, with equality
/// exactly at extremals. Neumann fields are first replaced by their zero-p-mean
/// representative so that J_p u annihilates constants. Throws DegenerateInput for u == 0.
double dual_quotient(const EnergyOperator& op, const Field& u, const EnergyParams& params, const SolverConfig& cfg);
double dual_quotient(InverseSolver& solver, const Field& u);

/// p E(u) / int |u|^p with the regularization scaled to u.
double rayleigh_quotient(const EnergyOperator& op, const Field& u, const EnergyParams& params);

/// ((Np(k-1) / Np(k))^{(p-1)/p} - 1) / tau; exact on separated solutions.
/// nullopt signals a vanishing norm.
std::optional<double> lambda_decay_estimate(const FlowTrajectory& traj, long k);

/// |mu - lambda^{1/(p-1)}| / lambda^{1/(p-1)}. Throws InvalidParameter for lambda <= 0.
double mu_lambda_consistency(double lambda, double mu, double p);

/// (1/p)(Np(k) - Np(k-1)) + (tau / (p-1)) p E(u^k); the scheme keeps this <= 0.
double energy_identity_residual(const FlowTrajectory& traj, long k);

/// Row for state u at step k; previous row supplies the rate and residual terms.
/// dual may be null to skip the inverse solve.
DiagnosticsRow compute_row(const EnergyOperator& op, const EnergyParams& params, double tau, long k, const Field& u,
                           const DiagnosticsRow* previous, InverseSolver* dual);

/// k,t,Np,rayleigh,dual_q,lambda_decay,lambda_rayleigh,mu_from_dual,conservation,energy_residual
void write_diagnostics_csv(std::ostream& out, const std::vector<DiagnosticsRow>& rows);

}  // namespace dnflow
