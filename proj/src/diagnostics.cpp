#include "dnflow/diagnostics.hpp"

#include "dnflow/errors.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace dnflow {

// Legendre form q (<f, u> - E(u)) at the minimizer u. It equals the pairing <f, u>
// when E is p-homogeneous (eps = 0). With eps > 0 the pairing carries a small
// regularization bias that the value form avoids, and the value is second order
// in the solver error where the pairing is first order.
double dual_norm_q(InverseSolver& solver, const Field& f) {
  const auto sol = solver.solve(f);
  const auto& op = solver.op();
  Field g = f;
  if (op.regime().kind == RegimeKind::neumann) g.array() -= g.mean();
  const double pairing = op.volume_weight() * g.dot(sol.u);
  return solver.params().q() * (pairing - op.energy(sol.u, sol.epsilon));
}

double dual_norm_q(const EnergyOperator& op, const Field& f, const EnergyParams& params, const SolverConfig& cfg) {
  InverseSolver solver(op, params, cfg, false);
  return dual_norm_q(solver, f);
}

double dual_quotient(InverseSolver& solver, const Field& u_in) {
  const auto& d = solver.op().domain();
  const double p = solver.op().p();
  const Field u = solver.op().regime().kind == RegimeKind::neumann ? zero_pmean_shift(d, u_in, p) : u_in;
  const double np = integrate_power(d, u, p);
  if (np == 0.0) throw DegenerateInput("dual quotient of the zero field");
  return np / dual_norm_q(solver, jp(u, p));
}

double dual_quotient(const EnergyOperator& op, const Field& u, const EnergyParams& params, const SolverConfig& cfg) {
  InverseSolver solver(op, params, cfg, false);
  return dual_quotient(solver, u);
}

double rayleigh_quotient(const EnergyOperator& op, const Field& u, const EnergyParams& params) {
  const double np = integrate_power(op.domain(), u, op.p());
  if (np == 0.0) throw DegenerateInput("Rayleigh quotient of the zero field");
  const double eps = scaled_epsilon(params, std::pow(np, 1.0 / op.p()));
  return op.p() * op.energy(u, eps) / np;
}

namespace {

std::optional<double> decay_rate(double np_prev, double np_cur, double p, double tau) {
  if (!(np_prev > 0.0) || !(np_cur > 0.0)) return std::nullopt;
  return (std::pow(np_prev / np_cur, (p - 1.0) / p) - 1.0) / tau;
}

}  // namespace

std::optional<double> lambda_decay_estimate(const FlowTrajectory& traj, long k) {
  if (k < 1 || k > traj.steps()) throw RangeError("lambda_decay_estimate needs 1 <= k <= K");
  return decay_rate(traj.diagnostics[k - 1].Np, traj.diagnostics[k].Np, traj.params.p, traj.tau);
}

double mu_lambda_consistency(double lambda, double mu, double p) {
  if (!(lambda > 0.0)) throw InvalidParameter("lambda must be positive");
  const double expected = std::pow(lambda, 1.0 / (p - 1.0));
  return std::abs(mu - expected) / expected;
}

double energy_identity_residual(const FlowTrajectory& traj, long k) {
  if (k < 1 || k > traj.steps()) throw RangeError("energy_identity_residual needs 1 <= k <= K");
  return traj.diagnostics[k].energy_residual;
}

DiagnosticsRow compute_row(const EnergyOperator& op, const EnergyParams& params, double tau, long k, const Field& u,
                           const DiagnosticsRow* previous, InverseSolver* dual) {
  const auto& d = op.domain();
  const double p = op.p();
  DiagnosticsRow row;
  row.k = k;
  row.t = tau * static_cast<double>(k);
  row.Np = integrate_power(d, u, p);
  const double scale = std::pow(row.Np, 1.0 / p);
  row.energy = op.energy(u, scaled_epsilon(params, scale));
  double conservation = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) conservation += jp(u[i], p);
  row.conservation = d.volume_weight() * conservation;
  if (row.Np > 0.0) {
    row.rayleigh = p * row.energy / row.Np;
    row.lambda_rayleigh = row.rayleigh;
    if (dual) {
      row.dual_q = dual_quotient(*dual, u);
      row.mu_from_dual = row.dual_q;
    }
  }
  if (previous) {
    if (auto rate = decay_rate(previous->Np, row.Np, p, tau)) row.lambda_decay = *rate;
    row.energy_residual = (row.Np - previous->Np) / p + tau / (p - 1.0) * p * row.energy;
  }
  return row;
}

namespace {

void put(std::ostream& out, double v) {
  char buf[40];
  if (std::isnan(v)) {
    out << "nan";
    return;
  }
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf;
}

}  // namespace

void write_diagnostics_csv(std::ostream& out, const std::vector<DiagnosticsRow>& rows) {
  out << "k,t,Np,rayleigh,dual_q,lambda_decay,lambda_rayleigh,mu_from_dual,conservation,energy_residual\n";
  for (const auto& r : rows) {
    out << r.k;
    for (double v : {r.t, r.Np, r.rayleigh, r.dual_q, r.lambda_decay, r.lambda_rayleigh, r.mu_from_dual,
                     r.conservation, r.energy_residual}) {
      out << ',';
      put(out, v);
    }
    out << '\n';
  }
}

}  // namespace dnflow
