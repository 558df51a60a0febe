#include "dnflow/minimize.hpp"

#include "dnflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dnflow {

void SolverConfig::validate() const {
  if (!(grad_tol > 0.0)) throw InvalidParameter("grad_tol must be positive");
  if (max_iters < 1) throw InvalidParameter("max_iters must be positive");
  if (!(line_search.shrink > 0.0 && line_search.shrink < 1.0)) throw InvalidParameter("shrink must lie in (0, 1)");
  if (!(line_search.sufficient_decrease > 0.0 && line_search.sufficient_decrease < 0.5))
    throw InvalidParameter("sufficient decrease constant must lie in (0, 0.5)");
  if (!(line_search.curvature > line_search.sufficient_decrease && line_search.curvature < 1.0))
    throw InvalidParameter("curvature constant must lie in (sufficient_decrease, 1)");
  if (restart_period < 0) throw InvalidParameter("restart_period must be nonnegative");
}

namespace {

struct Trial {
  double alpha = 0.0;
  double value = 0.0;
  double slope = 0.0;
  Field x;
  Field grad;
};

constexpr int kMaxLineSearchEvals = 60;

// Brackets a zero of phi'(alpha) = grad F(x + alpha d) . d and refines it with
// safeguarded secant steps. Returns false when no acceptable point was found.
bool line_search(const Objective& f, const Field& x, double fx, double slope0, const Field& d, double& alpha,
                 const LineSearchParams& ls, Trial& out, long& evaluations) {
  const double noise = 1e-12 * std::max(std::abs(fx), std::numeric_limits<double>::min());
  double lo = 0.0;
  double slope_lo = slope0;
  double hi = -1.0;
  double slope_hi = std::numeric_limits<double>::quiet_NaN();
  bool have_lo = false;
  Trial best;
  Trial trial;
  trial.grad.resize(x.size());
  for (int it = 0; it < kMaxLineSearchEvals; ++it) {
    trial.alpha = alpha;
    trial.x = x + alpha * d;
    trial.value = f(trial.x, trial.grad);
    ++evaluations;
    trial.slope = trial.grad.dot(d);
    const bool finite = std::isfinite(trial.value) && std::isfinite(trial.slope);
    const bool armijo = finite && trial.value <= fx + ls.sufficient_decrease * alpha * slope0 + noise;
    if (finite && armijo && std::abs(trial.slope) <= ls.curvature * std::abs(slope0)) {
      out = std::move(trial);
      return true;
    }
    if (finite && armijo && trial.slope < 0.0) {
      lo = alpha;
      slope_lo = trial.slope;
      best = trial;
      have_lo = true;
    } else {
      hi = alpha;
      slope_hi = (finite && trial.slope > 0.0) ? trial.slope : std::numeric_limits<double>::quiet_NaN();
    }

    if (hi < 0.0) {
      // Still descending: extrapolate the slope linearly, at least doubling.
      double next = 4.0 * lo;
      if (slope_lo > slope0) next = std::clamp(lo - slope_lo * lo / (slope_lo - slope0), 2.0 * lo, 16.0 * lo);
      alpha = next;
    } else if (std::isnan(slope_hi)) {
      alpha = lo + ls.shrink * (hi - lo);
    } else {
      const double width = hi - lo;
      const double secant = lo - slope_lo * width / (slope_hi - slope_lo);
      alpha = std::clamp(secant, lo + 1e-3 * width, hi - 1e-3 * width);
    }
    if (hi >= 0.0 && hi - lo <= 1e-15 * std::max(hi, 1e-300)) break;
  }
  if (have_lo) {
    out = std::move(best);
    return true;
  }
  return false;
}

}  // namespace

MinimizeResult minimize_cg(const Objective& f, Field x0, const SolverConfig& cfg, double reference_norm,
                           const StopTest& stop, const Preconditioner& precondition) {
  cfg.validate();
  MinimizeResult res;
  res.x = std::move(x0);
  Field g(res.x.size());
  res.value = f(res.x, g);
  res.evaluations = 1;
  res.grad_norm = g.norm();
  const double ref = reference_norm > 0.0 ? reference_norm : res.grad_norm;
  const double target = cfg.grad_tol * ref;
  auto done = [&](const Field& x, const Field& grad, double value, double gnorm) {
    if (gnorm == 0.0) return true;
    if (stop) return stop(x, grad, value);
    return gnorm <= target;
  };
  if (!std::isfinite(res.value)) return res;
  if (done(res.x, g, res.value, res.grad_norm)) {
    res.converged = true;
    return res;
  }
  const long restart = cfg.restart_period > 0 ? cfg.restart_period : std::max<long>(res.x.size(), 1);
  Field diag(res.x.size());
  auto scaled = [&](const Field& x, const Field& grad) -> Field {
    if (!precondition) return grad;
    precondition(x, diag);
    const double top = diag.maxCoeff();
    if (!(top > 0.0) || !std::isfinite(top)) return grad;
    return grad.cwiseQuotient(diag.cwiseMax(1e-12 * top));
  };
  Field z = scaled(res.x, g);
  double zg = z.dot(g);
  Field d = -z;
  double slope = -zg;
  const double xscale = res.x.lpNorm<Eigen::Infinity>();
  double alpha = xscale > 0.0 ? 1e-2 * xscale / d.lpNorm<Eigen::Infinity>() : 1.0 / res.grad_norm;
  long since_restart = 0;
  bool steepest = true;
  Trial trial;
  while (res.iterations < cfg.max_iters) {
    if (!line_search(f, res.x, res.value, slope, d, alpha, cfg.line_search, trial, res.evaluations)) {
      if (steepest) break;
      d = -z;
      slope = -zg;
      alpha = 1e-2 * std::max(res.x.lpNorm<Eigen::Infinity>(), 1e-300) / d.lpNorm<Eigen::Infinity>();
      steepest = true;
      since_restart = 0;
      continue;
    }
    ++res.iterations;
    ++since_restart;
    const double step_alpha = trial.alpha;
    const double old_slope = slope;
    res.x = std::move(trial.x);
    res.value = trial.value;
    Field g_new = std::move(trial.grad);
    res.grad_norm = g_new.norm();
    if (done(res.x, g_new, res.value, res.grad_norm)) {
      res.converged = true;
      return res;
    }
    Field z_new = scaled(res.x, g_new);
    const double beta = std::max(0.0, z_new.dot(g_new - g) / zg);
    g = std::move(g_new);
    z = std::move(z_new);
    zg = z.dot(g);
    if (since_restart >= restart || beta == 0.0) {
      d = -z;
      since_restart = 0;
      steepest = true;
    } else {
      d = -z + beta * d;
      steepest = false;
    }
    slope = g.dot(d);
    if (!(slope < 0.0)) {
      d = -z;
      slope = -zg;
      since_restart = 0;
      steepest = true;
    }
    alpha = step_alpha * old_slope / slope;
    if (!(alpha > 0.0) || !std::isfinite(alpha)) alpha = step_alpha;
  }
  return res;
}

}  // namespace dnflow
