#pragma once

#include "dnflow/minimize.hpp"
#include "dnflow/operators.hpp"

#include <optional>

namespace dnflow {

struct StepResult {
  Field u;
  long iterations = 0;
  /// ||grad F(u)|| / ||grad F(u_prev)||
  double relative_residual = 0.0;
};

/// One step of the implicit scheme (J_p(u) - J_p(u_prev)) / tau = Delta_p u, computed as
/// the minimizer of tau E(u) + (1/p) int |u|^p - int J_p(u_prev) u, warm-started at u_prev.
/// The regularization length is params.epsilon times ||u_prev||_p, so the step commutes
/// with scaling. Throws NonConvergence when the budget runs out.
StepResult implicit_step(const EnergyOperator& op, const Field& u_prev, double tau, const EnergyParams& params,
                         const SolverConfig& cfg);

/// Value of the step functional F (divided by the volume weight) at u.
double step_functional(const EnergyOperator& op, const Field& u, const Field& u_prev, double tau, double eps);

struct InverseSolution {
  Field u;
  double epsilon = 0.0;  ///< absolute regularization length the solution satisfies
  long iterations = 0;
  double relative_residual = 0.0;
};

/// Weak solution of -Delta_p u = f for the operator's regime, as the minimizer of
/// E(u) - int f u. The data is normalized to unit L^q norm before solving, so the
/// result is (q - 1)-homogeneous in f up to the solver tolerance. Successive solves
/// warm-start from the previous normalized solution.
class InverseSolver {
 public:
  InverseSolver(const EnergyOperator& op, EnergyParams params, SolverConfig cfg, bool warm_start = true);

  InverseSolution solve(const Field& f);

  const EnergyOperator& op() const { return *op_; }
  const EnergyParams& params() const { return params_; }

 private:
  const EnergyOperator* op_;
  EnergyParams params_;
  SolverConfig cfg_;
  bool warm_start_;
  std::optional<Field> previous_;
};

Field inverse_operator(const EnergyOperator& op, const Field& f, const EnergyParams& params, const SolverConfig& cfg);
Field inverse_operator(const Domain& d, const Field& f, const EnergyParams& params, const BoundaryRegime& regime,
                       const SolverConfig& cfg);

/// Constant c with sum_i jp(u_i + c) = 0 (uniform weights), found by bisection on the
/// increasing map c -> sum jp(u_i + c).
double zero_pmean_constant(const Field& u, double p);

/// u + c with the weighted p-mean sum w jp(u_i + c) equal to zero.
Field zero_pmean_shift(const Domain& d, const Field& u, double p);

/// Throws CompatibilityError when |int f| exceeds 1e-10 * int |f|.
void check_neumann_compatible(const Domain& d, const Field& f);

}  // namespace dnflow
