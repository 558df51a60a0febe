#pragma once

#include "dnflow/minimize.hpp"
#include "dnflow/operators.hpp"

#include <Eigen/Dense>
#include <cstdint>

namespace dnflow {

/// Discrete first eigenpair of a regime.
struct EigenResult {
  double lambda = 0.0;
  double mu = 0.0;  ///< lambda^{1/(p-1)}
  /// Unit L^p norm, positive at the node of largest magnitude.
  Field extremal;
  long iterations = 0;
  /// ||grad E(phi) - lambda J_p(phi)|| / ||lambda J_p(phi)|| (weighted l^2)
  double residual = 0.0;
};

/// Minimizes the Rayleigh quotient p E(u) / int |u|^p by nonlinear CG from a
/// seeded positive field, renormalizing to unit L^p norm. For Neumann the
/// denominator is min_c int |u + c|^p, i.e. the quotient of the zero-p-mean shift.
EigenResult minimize_rayleigh(const EnergyOperator& op, const EnergyParams& params, const SolverConfig& cfg,
                              std::uint64_t seed = 1);

/// Same, starting from a supplied field.
EigenResult minimize_rayleigh_from(const EnergyOperator& op, const EnergyParams& params, const SolverConfig& cfg,
                                   Field start);

/// Symmetric matrix M of the p = 2 energy (E = u^T M u / 2), assembled directly from the
/// grid or the fractional weights. Throws BudgetError above 2000 nodes.
Eigen::MatrixXd assemble_linear_operator(const Domain& d, const BoundaryRegime& regime);

/// Smallest eigenpair of M / volume_weight (smallest nonzero for Neumann) by a dense
/// symmetric eigensolve.
EigenResult dense_linear_reference(const Domain& d, const BoundaryRegime& regime);

/// Flips u so its largest-magnitude node is positive. Unless the regime is Neumann,
/// throws SignViolation when any value is below -tol * max|u|.
Field extremal_sign_normalize(const Field& u, RegimeKind regime, double tol = 1e-8);

/// Relative eigen-equation defect of (lambda, phi) for the operator.
double eigen_residual(const EnergyOperator& op, const Field& phi, double lambda, double eps);

/// Seeded positive pseudo-random field with values in [0.5, 1.5).
Field seeded_positive_field(Eigen::Index n, std::uint64_t seed);

}  // namespace dnflow
