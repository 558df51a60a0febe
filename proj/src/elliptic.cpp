#include "dnflow/elliptic.hpp"

#include "dnflow/errors.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace dnflow {

namespace {

// Sum of |u|^p / p and the J_p image, one pow per node.
double power_term(const Field& u, double p, Field& jp_out) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double a = std::abs(u[i]);
    const double ap = a > 0.0 ? (p == 2.0 ? a : std::pow(a, p - 1.0)) : 0.0;
    sum += a * ap;
    jp_out[i] = std::copysign(ap, u[i]);
  }
  return sum / p;
}

}  // namespace

double step_functional(const EnergyOperator& op, const Field& u, const Field& u_prev, double tau, double eps) {
  Field j(u.size());
  const double mass = power_term(u, op.p(), j);
  return tau * op.energy(u, eps) / op.volume_weight() + mass - jp(u_prev, op.p()).dot(u);
}

StepResult implicit_step(const EnergyOperator& op, const Field& u_prev, double tau, const EnergyParams& params,
                         const SolverConfig& cfg) {
  params.validate();
  cfg.validate();
  check_shape(op.domain(), u_prev);
  if (!(tau > 0.0)) throw InvalidParameter("time step tau must be positive");
  StepResult res;
  const double p = op.p();
  const double scale = lp_norm(op.domain(), u_prev, p);
  if (scale == 0.0) {
    res.u = Field::Zero(u_prev.size());
    return res;
  }
  const double eps = scaled_epsilon(params, scale);
  const Field source = jp(u_prev, p);
  const double w = op.volume_weight();
  Field egrad(u_prev.size());
  Field j(u_prev.size());
  Objective objective = [&](const Field& u, Field& grad) {
    const double e = op.energy_and_gradient(u, eps, egrad);
    const double mass = power_term(u, p, j);
    grad = tau * egrad + j - source;
    return tau * e / w + mass - source.dot(u);
  };
  Field g0(u_prev.size());
  objective(u_prev, g0);
  const double ref = g0.norm();
  if (ref == 0.0) {
    res.u = u_prev;
    return res;
  }
  // Diagonal of tau E'' plus the curvature (p-1)|u|^{p-2} of the power term, the
  // latter capped where u nearly vanishes.
  // For p < 2 the power term stiffens where u is small: scale directions by the
  // diagonal of tau E'' + (p-1)|u|^{p-2}, capped near zeros.
  const double floor = 1e-3 * u_prev.cwiseAbs().maxCoeff();
  Preconditioner precondition;
  if (p < 2.0) {
    precondition = [&](const Field& u, Field& diag) {
      op.hessian_diagonal(u, eps, diag);
      diag *= tau;
      for (Eigen::Index i = 0; i < u.size(); ++i)
        diag[i] += (p - 1.0) * std::pow(std::max(std::abs(u[i]), floor), p - 2.0);
    };
  }
  auto out = minimize_cg(objective, u_prev, cfg, ref, {}, precondition);
  res.u = std::move(out.x);
  res.iterations = out.iterations;
  res.relative_residual = out.grad_norm / ref;
  if (!out.converged)
    throw NonConvergence("implicit step did not converge (relative residual " +
                             std::to_string(res.relative_residual) + ")",
                         res.u, res.relative_residual);
  return res;
}

void check_neumann_compatible(const Domain& d, const Field& f) {
  const double total = integrate(d, f);
  const double scale = d.volume_weight() * f.cwiseAbs().sum();
  if (std::abs(total) > 1e-10 * scale)
    throw CompatibilityError("Neumann data must integrate to zero (integral " + std::to_string(total) + ")");
}

InverseSolver::InverseSolver(const EnergyOperator& op, EnergyParams params, SolverConfig cfg, bool warm_start)
    : op_(&op), params_(params), cfg_(cfg), warm_start_(warm_start) {
  params_.validate();
  cfg_.validate();
}

InverseSolution InverseSolver::solve(const Field& f_in) {
  const auto& d = op_->domain();
  check_shape(d, f_in);
  const double p = op_->p();
  const double q = params_.q();
  const bool neumann = op_->regime().kind == RegimeKind::neumann;
  InverseSolution res;
  Field f = f_in;
  if (neumann) {
    check_neumann_compatible(d, f);
    f.array() -= f.mean();
  }
  const double fnorm = lp_norm(d, f, q);
  if (fnorm == 0.0) {
    res.u = Field::Zero(f.size());
    return res;
  }
  const Field fhat = f / fnorm;
  const double w = op_->volume_weight();
  Field egrad(f.size());
  auto solve_with = [&](Field start, double eps) {
    Objective objective = [&](const Field& u, Field& grad) {
      const double e = op_->energy_and_gradient(u, eps, egrad);
      grad = egrad - fhat;
      return e / w - fhat.dot(u);
    };
    Preconditioner precondition = [&](const Field& u, Field& diag) { op_->hessian_diagonal(u, eps, diag); };
    // The gradient at u = 0 is -fhat; tolerances are relative to it.
    return minimize_cg(objective, std::move(start), cfg_, fhat.norm(), {}, precondition);
  };
  Field start = (warm_start_ && previous_) ? *previous_ : Field::Zero(f.size());
  double scale = warm_start_ && previous_ ? lp_norm(d, *previous_, p) : 1.0;
  if (!(scale > 0.0)) scale = 1.0;
  auto out = solve_with(start, scaled_epsilon(params_, scale));
  long iterations = out.iterations;
  if (params_.epsilon > 0.0 && out.converged) {
    const double actual = lp_norm(d, out.x, p);
    if (actual > 0.0 && std::abs(actual / scale - 1.0) > 0.5) {
      scale = actual;
      out = solve_with(out.x, scaled_epsilon(params_, scale));
      iterations += out.iterations;
    }
  }
  res.relative_residual = out.grad_norm / fhat.norm();
  res.iterations = iterations;
  if (!out.converged)
    throw NonConvergence("inverse solve did not converge (relative residual " +
                             std::to_string(res.relative_residual) + ")",
                         out.x, res.relative_residual);
  Field uhat = std::move(out.x);
  if (neumann) uhat = zero_pmean_shift(d, uhat, p);
  if (warm_start_) previous_ = uhat;
  const double factor = std::pow(fnorm, q - 1.0);
  res.u = factor * uhat;
  res.epsilon = scaled_epsilon(params_, scale) * factor;
  return res;
}

Field inverse_operator(const EnergyOperator& op, const Field& f, const EnergyParams& params, const SolverConfig& cfg) {
  return InverseSolver(op, params, cfg, false).solve(f).u;
}

Field inverse_operator(const Domain& d, const Field& f, const EnergyParams& params, const BoundaryRegime& regime,
                       const SolverConfig& cfg) {
  const EnergyOperator op(d, regime, params.p);
  return inverse_operator(op, f, params, cfg);
}

namespace {

double pmean_sum(const Field& u, double c, double p, double* abs_sum) {
  double sum = 0.0;
  double mag = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double v = jp(u[i] + c, p);
    sum += v;
    mag += std::abs(v);
  }
  if (abs_sum) *abs_sum = mag;
  return sum;
}

}  // namespace

double zero_pmean_constant(const Field& u, double p) {
  if (u.size() == 0) return 0.0;
  if (p == 2.0) return -u.mean();
  double mag = 0.0;
  const double s0 = pmean_sum(u, 0.0, p, &mag);
  if (mag == 0.0 || std::abs(s0) <= 1e-15 * mag) return 0.0;
  // S(-max u) <= 0 <= S(-min u).
  double lo = -u.maxCoeff();
  double hi = -u.minCoeff();
  double s_lo = pmean_sum(u, lo, p, nullptr);
  double s_hi = pmean_sum(u, hi, p, nullptr);
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    const double s = pmean_sum(u, mid, p, nullptr);
    if (s == 0.0) return mid;
    if (s < 0.0) {
      lo = mid;
      s_lo = s;
    } else {
      hi = mid;
      s_hi = s;
    }
  }
  return std::abs(s_lo) <= std::abs(s_hi) ? lo : hi;
}

Field zero_pmean_shift(const Domain& d, const Field& u, double p) {
  check_shape(d, u);
  return u.array() + zero_pmean_constant(u, p);
}

}  // namespace dnflow
