#pragma once

#include "dnflow/field.hpp"

#include <functional>

namespace dnflow {

struct LineSearchParams {
  double shrink = 0.5;                ///< backtracking factor on rejected trials
  double sufficient_decrease = 1e-4;  ///< Armijo constant
  double curvature = 0.1;             ///< |phi'(a)| <= curvature * |phi'(0)|
};

struct SolverConfig {
  double grad_tol = 1e-9;
  long max_iters = 200000;
  LineSearchParams line_search{};
  /// Nonlinear CG restart interval; 0 means the problem dimension.
  long restart_period = 0;

  void validate() const;
};

/// Objective callback: returns F(x) and writes its gradient.
using Objective = std::function<double(const Field& x, Field& grad)>;

/// Optional convergence predicate evaluated on (x, gradient, value).
using StopTest = std::function<bool(const Field& x, const Field& grad, double value)>;

/// Writes a positive diagonal approximation of the Hessian at x (used to scale the
/// search directions).
using Preconditioner = std::function<void(const Field& x, Field& diag)>;

struct MinimizeResult {
  Field x;
  double value = 0.0;
  double grad_norm = 0.0;
  long iterations = 0;
  long evaluations = 0;
  bool converged = false;
};

/// Polak-Ribiere+ nonlinear conjugate gradient with a bracketing line search on
/// the directional derivative. Stops when ||grad|| <= grad_tol * reference_norm
/// (reference_norm <= 0 selects ||grad F(x0)||), or when stop() returns true.
/// With a preconditioner the directions follow diag^{-1} grad (PR+ in the scaled metric).
MinimizeResult minimize_cg(const Objective& f, Field x0, const SolverConfig& cfg, double reference_norm = 0.0,
                           const StopTest& stop = {}, const Preconditioner& precondition = {});

}  // namespace dnflow
