#include "dnflow/invariants.hpp"

#include "dnflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

namespace dnflow {

namespace {

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double max_abs(const Field& u) { return u.size() ? u.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

CheckResult make_check(std::string name, double worst, double limit, long samples, std::string detail) {
  CheckResult r;
  r.name = std::move(name);
  r.worst = worst;
  r.limit = limit;
  r.samples = samples;
  r.passed = std::isfinite(worst) && worst <= limit;
  r.detail = std::move(detail);
  return r;
}

std::vector<CheckResult> check_trajectory(const FlowTrajectory& traj, double lambda_h, double grad_tol, double slack) {
  const auto& rows = traj.diagnostics;
  const double p = traj.params.p;
  const double tau = traj.tau;
  const double limit = slack * grad_tol;
  const long K = traj.steps();
  // every violation below is divided by the size of the quantity it bounds
  auto rel = [](double excess, double scale) { return scale > 0.0 ? excess / scale : excess; };

  // signed: negative values report the margin by which the inequality holds
  const double lowest = -std::numeric_limits<double>::infinity();
  double decay = lowest, scaled = lowest, mono = lowest, convex = lowest, bound = lowest, ident = lowest, cons = 0.0;
  const double gain = 1.0 + p * tau * lambda_h / (p - 1.0);
  for (long k = 1; k <= K; ++k) {
    const auto& a = rows[k - 1];
    const auto& b = rows[k];
    decay = std::max(decay, rel(b.Np - a.Np, a.Np));
    scaled = std::max(scaled, rel(gain * b.Np - a.Np, a.Np));
    mono = std::max(mono, rel(b.energy - a.energy, a.energy));
    ident = std::max(ident, rel(b.energy_residual, a.Np));
    if (k + 1 <= K) convex = std::max(convex, rel(-(rows[k + 1].Np - 2.0 * b.Np + a.Np), a.Np));
    // Summing the step inequality over m steps and using monotone energy:
    //   m tau (p/(p-1)) p E_k <= Np_{k-m} - Np_k <= Np_{k-m}
    const double lhs = p * b.energy * p / (p - 1.0);
    for (long m = 1; m <= k; ++m) {
      const double np = rows[k - m].Np;
      bound = std::max(bound, rel(lhs * m * tau - np, np));
    }
  }
  std::vector<CheckResult> out;
  out.push_back(make_check("lp_decay", decay, limit, K));
  out.push_back(make_check("scaled_decay", scaled, limit, K, fmt("lambda_h=%.10g", lambda_h)));
  out.push_back(make_check("energy_monotone", mono, limit, K));
  out.push_back(make_check("convexity_trend", convex, limit, std::max(0L, K - 1)));
  out.push_back(make_check("decay_bound", bound, limit, K * (K + 1) / 2));
  out.push_back(make_check("energy_identity", ident, limit, K));
  if (traj.regime.kind == RegimeKind::neumann) {
    for (long k = 0; k <= K; ++k) {
      const Field& u = traj.states[k];
      double mass = 0.0;
      for (Eigen::Index i = 0; i < u.size(); ++i) mass += std::pow(std::abs(u[i]), p - 1.0);
      const double w = u.size() ? rows[k].Np / u.cwiseAbs().array().pow(p).sum() : 0.0;
      if (mass > 0.0 && w > 0.0) cons = std::max(cons, std::abs(rows[k].conservation) / (w * mass));
    }
    out.push_back(make_check("neumann_conservation", cons, limit, K + 1));
  }
  return out;
}

CheckResult check_separation(const EnergyOperator& op, const EigenResult& eig, double tau, long steps,
                             const EnergyParams& params, const SolverConfig& cfg, double limit) {
  EvolveOptions opts;
  opts.dual = false;
  const auto traj = evolve(op, eig.extremal, tau, steps, params, cfg, opts);
  const double factor = std::pow(1.0 + eig.lambda * tau, -1.0 / (op.p() - 1.0));
  double worst = 0.0;
  double c = 1.0;
  for (long k = 1; k <= traj.steps(); ++k) {
    c *= factor;
    const Field expected = c * eig.extremal;
    worst = std::max(worst, max_abs(traj.states[k] - expected) / max_abs(expected));
  }
  return make_check("separation", worst, limit, steps, fmt("tau=%.6g lambda_h=%.10g", tau, eig.lambda));
}

CheckResult check_comparison(const FlowTrajectory& traj, const EigenResult& eig, double grad_tol, double slack) {
  const double p = traj.params.p;
  const Field& g = traj.states.front();
  double a = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    if (eig.extremal[i] > 0.0) a = std::min(a, g[i] / eig.extremal[i]);
  }
  if (!(a > 0.0) || !std::isfinite(a)) throw InvalidParameter("comparison needs g >= a phi with a > 0");
  const double factor = std::pow(1.0 + eig.lambda * traj.tau, -1.0 / (p - 1.0));
  double worst = 0.0;
  double c = a;
  for (long k = 1; k <= traj.steps(); ++k) {
    c *= factor;
    const Field gap = c * eig.extremal - traj.states[k];
    worst = std::max(worst, gap.maxCoeff());
  }
  return make_check("comparison", worst, slack * grad_tol, traj.steps(), fmt("a=%.6g", a));
}

CheckResult check_sign_definite(const Field& profile) {
  Eigen::Index at = 0;
  profile.cwiseAbs().maxCoeff(&at);
  const double sign = profile[at] >= 0.0 ? 1.0 : -1.0;
  const double lowest = (sign * profile).minCoeff();
  // worst is 1 when some node fails strict positivity
  return make_check("sign_definite", lowest > 0.0 ? 0.0 : 1.0, 0.0, profile.size(),
                    fmt("min/max=%.6g", lowest / max_abs(profile)));
}

Field random_field(const Domain& d, std::uint64_t seed, bool zero_mean) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const auto& x = d.coordinates();
  double amp[3], freq[3][2];
  for (int m = 0; m < 3; ++m) {
    amp[m] = unit(rng);
    freq[m][0] = 1 + static_cast<int>(4.0 * std::abs(unit(rng)));
    freq[m][1] = 1 + static_cast<int>(4.0 * std::abs(unit(rng)));
  }
  const double rough = std::abs(unit(rng));
  Field f(d.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    double v = rough * unit(rng);
    for (int m = 0; m < 3; ++m) {
      double s = std::sin(M_PI * freq[m][0] * x[i][0]);
      if (d.dimension() == 2) s *= std::sin(M_PI * freq[m][1] * x[i][1]);
      v += amp[m] * s;
    }
    f[i] = v;
  }
  if (zero_mean) f.array() -= f.mean();
  return f;
}

std::vector<CheckResult> check_dual(const EnergyOperator& op, const EnergyParams& params, const SolverConfig& cfg,
                                    const EigenResult& eig, long samples, std::uint64_t seed) {
  const auto& d = op.domain();
  const double p = op.p();
  const double q = params.q();
  const double mu = eig.mu;
  const bool neumann = op.regime().kind == RegimeKind::neumann;
  InverseSolver solver(op, params, cfg, false);

  std::vector<Field> fields, solutions;
  std::vector<double> norms_q;
  double violation = -std::numeric_limits<double>::infinity();
  double smallest_gap = std::numeric_limits<double>::infinity();
  for (long i = 0; i < samples; ++i) {
    Field f = random_field(d, seed * 7919 + static_cast<std::uint64_t>(i), neumann);
    auto sol = solver.solve(f);
    const double nq = d.volume_weight() * f.dot(sol.u);
    const double ratio = mu * nq / integrate_power(d, f, q);
    violation = std::max(violation, ratio - 1.0);
    smallest_gap = std::min(smallest_gap, 1.0 - ratio);
    fields.push_back(std::move(f));
    solutions.push_back(std::move(sol.u));
    norms_q.push_back(nq);
  }
  const Field fe = jp(eig.extremal, p);
  const double eq_ratio = mu * dual_norm_q(solver, fe) / integrate_power(d, fe, q);
  const double eq_gap = std::abs(1.0 - eq_ratio);

  std::vector<CheckResult> out;
  out.push_back(make_check("dual_inequality", violation, 1e-6, samples));
  out.push_back(make_check("equality_gap", eq_gap, 10.0 * cfg.grad_tol, 1));
  // random fields must sit well away from the equality case
  const double floor = 10.0 * (10.0 * cfg.grad_tol);
  out.push_back(make_check("nonextremal_gap", floor / std::max(smallest_gap, 1e-300), 1.0, samples,
                           fmt("min gap %.3g, required >= %.3g", smallest_gap, floor)));
  if (neumann && samples >= 2) {
    double tri = -std::numeric_limits<double>::infinity(), mink = tri;
    for (long i = 0; i < samples; ++i) {
      const long j = (i + 1) % samples;
      const double nf = std::pow(norms_q[i], 1.0 / q);
      const double ng = std::pow(norms_q[j], 1.0 / q);
      const Field sum = fields[i] + fields[j];
      const double ns = std::pow(std::max(dual_norm_q(solver, sum), 0.0), 1.0 / q);
      tri = std::max(tri, ns / (nf + ng) - 1.0);
      const double pairing = std::abs(d.volume_weight() * fields[i].dot(solutions[j]));
      mink = std::max(mink, pairing / (nf * std::pow(ng, q - 1.0)) - 1.0);
    }
    out.push_back(make_check("triangle", tri, 1e-6, samples));
    out.push_back(make_check("minkowski", mink, 1e-6, samples));
  }
  return out;
}

std::vector<CheckResult> check_quotient_refinement(const EnergyOperator& op, const Field& g, const EnergyParams& params,
                                                   const SolverConfig& cfg, double tau0, long steps0, int levels,
                                                   double factor, double slack) {
  if (levels < 2) throw InvalidParameter("refinement needs at least two tau levels");
  std::vector<double> inc_dual, inc_ray;
  double scale = 0.0;
  for (int l = 0; l < levels; ++l) {
    const double tau = tau0 / std::pow(2.0, l);
    const long steps = steps0 << l;
    const auto traj = evolve(op, g, tau, steps, params, cfg);
    double a = 0.0, b = 0.0;
    for (long k = 1; k <= traj.steps(); ++k) {
      const auto& r0 = traj.diagnostics[k - 1];
      const auto& r1 = traj.diagnostics[k];
      a = std::max(a, r1.dual_q - r0.dual_q);
      b = std::max(b, r1.rayleigh - r0.rayleigh);
      scale = std::max({scale, std::abs(r1.dual_q), std::abs(r1.rayleigh)});
    }
    inc_dual.push_back(a);
    inc_ray.push_back(b);
  }
  const double floor = slack * cfg.grad_tol * scale;
  auto judge = [&](const char* name, const std::vector<double>& inc) {
    double worst = 0.0;
    std::string detail = "increments";
    // ratio to the allowed value, so 1 is the threshold
    for (std::size_t l = 0; l < inc.size(); ++l) {
      detail += fmt(" %.3g", inc[l]);
      if (l > 0) worst = std::max(worst, inc[l] / std::max(inc[l - 1] / factor, floor));
    }
    detail += fmt(" floor %.3g", floor);
    return make_check(name, worst, 1.0, levels, detail);
  };
  return {judge("dual_quotient_trend", inc_dual), judge("rayleigh_trend", inc_ray)};
}

CheckResult check_gradient(const EnergyOperator& op, const EnergyParams& params, long samples, std::uint64_t seed,
                           double limit) {
  const auto& d = op.domain();
  const double w = d.volume_weight();
  double worst = 0.0;
  for (long s = 0; s < samples; ++s) {
    const Field u = random_field(d, seed * 104729 + static_cast<std::uint64_t>(s));
    const double eps = std::max(scaled_epsilon(params, lp_norm(d, u, op.p())), params.p < 2.0 ? 1e-8 : 0.0);
    const Field g = op.gradient(u, eps) * w;
    Field fd(u.size());
    Field v = u;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      const double h = 1e-6 * std::max(1.0, std::abs(u[i]));
      v[i] = u[i] + h;
      const double up = op.energy(v, eps);
      v[i] = u[i] - h;
      const double down = op.energy(v, eps);
      v[i] = u[i];
      fd[i] = (up - down) / (2.0 * h);
    }
    const double norm = g.norm();
    if (norm > 0.0) worst = std::max(worst, (fd - g).norm() / norm);
  }
  return make_check("gradient_fd", worst, limit, samples);
}

Field canonical_initial(const EnergyOperator& op) {
  const auto& d = op.domain();
  if (op.regime().kind != RegimeKind::neumann) return Field::Ones(d.size());
  Field g(d.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) g[i] = d.coordinates()[i][0];
  return g;
}

std::vector<CheckResult> run_invariant_suite(const EnergyOperator& op, const EnergyParams& params,
                                             const SolverConfig& cfg, const EigenResult& eig,
                                             const SuiteOptions& opts) {
  std::vector<CheckResult> out;
  const bool neumann = op.regime().kind == RegimeKind::neumann;
  out.push_back(make_check("oracle_residual", eig.residual, 10.0 * cfg.grad_tol, eig.iterations));

  const double tau = opts.tau_fraction / eig.lambda;
  const Field g = canonical_initial(op);
  EvolveOptions plain;
  plain.dual = false;
  const auto traj = evolve(op, g, tau, opts.steps, params, cfg, plain);
  for (auto& c : check_trajectory(traj, eig.lambda, cfg.grad_tol)) out.push_back(std::move(c));
  SolverConfig half = cfg;
  half.grad_tol = cfg.grad_tol / 2.0;
  const auto traj_half = evolve(op, g, tau, opts.steps, params, half, plain);
  for (auto& c : check_trajectory(traj_half, eig.lambda, half.grad_tol)) {
    c.name += "@half_tol";
    out.push_back(std::move(c));
  }
  if (!neumann) {
    out.push_back(check_comparison(traj, eig, cfg.grad_tol));
    if (auto prof = rescaled_profile(traj, traj.steps())) out.push_back(check_sign_definite(*prof));
  }
  const long sep_steps = std::max(1L, opts.steps / 2);
  out.push_back(check_separation(op, eig, 2.0 * tau, sep_steps, params, cfg, sep_steps * 10.0 * cfg.grad_tol));

  for (auto& c : check_dual(op, params, cfg, eig, opts.samples, opts.seed)) out.push_back(std::move(c));
  for (auto& c : check_quotient_refinement(op, g, params, cfg, 4.0 * tau, 10)) out.push_back(std::move(c));
  out.push_back(check_gradient(op, params, std::min(opts.samples, 20L), opts.seed));

  const auto lim = run_to_limit(op, g, params, cfg);
  if (lim.degenerate) {
    out.push_back(make_check("limit_nondegenerate", 1.0, 0.0, lim.steps, "flow reached the zero state"));
    return out;
  }
  out.push_back(make_check("lambda_agreement", std::abs(lim.lambda - eig.lambda) / eig.lambda, 5e-3, lim.steps,
                           fmt("flow %.10g oracle %.10g", lim.lambda, eig.lambda)));
  out.push_back(make_check("mu_lambda", mu_lambda_consistency(lim.lambda, lim.mu, op.p()), 0.02, 1,
                           fmt("mu %.10g", lim.mu)));
  bool gated = false;
  if (neumann) {
    const auto other = minimize_rayleigh(op, params, cfg, opts.seed + 1);
    const double diff = std::min(lp_norm(op.domain(), other.extremal - eig.extremal, op.p()),
                                 lp_norm(op.domain(), other.extremal + eig.extremal, op.p()));
    gated = diff > 1e-3;
    out.push_back(make_check("extremal_ratio_hypothesis", 0.0, 0.0, 2,
                             fmt(gated ? "seeds disagree (%.3g); profile check skipped" : "seeds agree (%.3g)", diff)));
  }
  if (!gated) {
    const double gap = std::min(lp_norm(op.domain(), lim.profile - eig.extremal, op.p()),
                                lp_norm(op.domain(), lim.profile + eig.extremal, op.p()));
    out.push_back(make_check("profile_limit", gap, 1e-3, lim.steps));
  }
  return out;
}

}  // namespace dnflow
