#include "dnflow/oracle.hpp"

#include "dnflow/elliptic.hpp"
#include "dnflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace dnflow {

Field seeded_positive_field(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(0.5, 1.5);
  Field u(n);
  for (Eigen::Index i = 0; i < n; ++i) u[i] = dist(rng);
  return u;
}

Field extremal_sign_normalize(const Field& u, RegimeKind regime, double tol) {
  if (u.size() == 0 || u.cwiseAbs().maxCoeff() == 0.0) throw DegenerateInput("cannot normalize the sign of a zero field");
  Eigen::Index imax = 0;
  u.cwiseAbs().maxCoeff(&imax);
  Field out = u[imax] < 0.0 ? Field(-u) : u;
  if (regime != RegimeKind::neumann) {
    const double floor = -tol * out[imax];
    if (out.minCoeff() < floor)
      throw SignViolation("extremal changes sign (min " + std::to_string(out.minCoeff()) + ", max " +
                          std::to_string(out[imax]) + ")");
  }
  return out;
}

double eigen_residual(const EnergyOperator& op, const Field& phi, double lambda, double eps) {
  const Field g = op.gradient(phi, eps);
  const Field target = lambda * jp(phi, op.p());
  return (g - target).norm() / target.norm();
}

namespace {

struct Quotient {
  const EnergyOperator& op;
  double eps_rel;
  bool neumann;
  Field egrad;

  Field shifted(const Field& x) const {
    if (!neumann) return x;
    return x.array() + zero_pmean_constant(x, op.p());
  }

  // R(x) = p E(x) / int |y|^p with y the (Neumann-shifted) field and the regularization
  // length eps_rel * ||y||_p, which makes R exactly 0-homogeneous. The shift drops out of
  // the derivative because y minimizes int |x + c|^p over c; the derivative through the
  // regularization length points along J_p(y) and is fixed by Euler's identity x . grad R = 0.
  double operator()(const Field& x, Field& grad) {
    const double p = op.p();
    const double w = op.volume_weight();
    const Field y = shifted(x);
    const Field j = jp(y, p);
    const double np = w * y.dot(j);
    if (!(np > 0.0) || !std::isfinite(np)) {
      grad.setZero(x.size());
      return std::numeric_limits<double>::infinity();
    }
    const double e = op.energy_and_gradient(x, eps_rel * std::pow(np, 1.0 / p), egrad);
    const double r = p * e / np;
    grad = (p * w / np) * (egrad - r * j);
    if (eps_rel > 0.0) grad -= (x.dot(grad) / np) * (w * j);
    return r;
  }

  // Stationarity of R in the units of the eigen-equation defect:
  // ||grad R|| Np / (p w R ||J_p(y)||).
  double stationarity(const Field& x) {
    Field grad(x.size());
    const double r = (*this)(x, grad);
    const Field y = shifted(x);
    const Field j = jp(y, op.p());
    const double np = op.volume_weight() * y.dot(j);
    return grad.norm() * np / (op.p() * op.volume_weight() * r * j.norm());
  }
};

}  // namespace

EigenResult minimize_rayleigh_from(const EnergyOperator& op, const EnergyParams& params, const SolverConfig& cfg,
                                   Field start) {
  params.validate();
  cfg.validate();
  const auto& d = op.domain();
  check_shape(d, start);
  const double p = op.p();
  const bool neumann = op.regime().kind == RegimeKind::neumann;
  if (neumann) start = zero_pmean_shift(d, start, p);
  double norm = lp_norm(d, start, p);
  if (!(norm > 0.0)) throw DegenerateInput("Rayleigh descent needs a nonzero start");
  Field x = start / norm;

  Quotient quotient{op, params.epsilon, neumann, Field(x.size())};
  Objective objective = [&](const Field& v, Field& grad) { return quotient(v, grad); };
  StopTest stop = [&](const Field& v, const Field&, double) { return quotient.stationarity(v) <= cfg.grad_tol; };

  EigenResult res;
  const long round = std::max<long>(1000, 4 * x.size());
  bool converged = false;
  while (res.iterations < cfg.max_iters) {
    SolverConfig round_cfg = cfg;
    round_cfg.max_iters = std::min(round, cfg.max_iters - res.iterations);
    auto out = minimize_cg(objective, x, round_cfg, 0.0, stop);
    res.iterations += std::max<long>(out.iterations, 1);
    x = quotient.shifted(out.x);
    x /= lp_norm(d, x, p);
    if (out.converged) {
      converged = true;
      break;
    }
    if (out.iterations == 0) break;
  }
  res.residual = quotient.stationarity(x);
  if (!converged && res.residual > cfg.grad_tol)
    throw NonConvergence("Rayleigh descent did not converge (residual " + std::to_string(res.residual) + ")", x,
                         res.residual);
  res.extremal = extremal_sign_normalize(x, op.regime().kind, 1e-6);
  Field unused(x.size());
  res.lambda = quotient(res.extremal, unused);
  res.mu = std::pow(res.lambda, 1.0 / (p - 1.0));
  res.residual = eigen_residual(op, res.extremal, res.lambda, scaled_epsilon(params, 1.0));
  return res;
}

EigenResult minimize_rayleigh(const EnergyOperator& op, const EnergyParams& params, const SolverConfig& cfg,
                              std::uint64_t seed) {
  return minimize_rayleigh_from(op, params, cfg, seeded_positive_field(op.size(), seed));
}

Eigen::MatrixXd assemble_linear_operator(const Domain& d, const BoundaryRegime& regime) {
  regime.check_compatible(d);
  const Eigen::Index n = d.size();
  if (n > 2000) throw BudgetError("dense reference is limited to 2000 nodes");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  if (regime.kind == RegimeKind::fractional_dirichlet) {
    const double s = regime.s;
    const double h = d.h();
    const auto& x = d.coordinates();
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (i == j) continue;
        const double w = h * h / std::pow(std::abs(x[i][0] - x[j][0]), 1.0 + 2.0 * s);
        m(i, j) -= 2.0 * w;
        m(i, i) += 2.0 * w;
      }
      const double kappa = (std::pow(x[i][0], -2.0 * s) + std::pow(1.0 - x[i][0], -2.0 * s)) / (2.0 * s);
      m(i, i) += 2.0 * h * kappa;
    }
    return m;
  }
  const bool zero_extension = regime.kind == RegimeKind::dirichlet;
  const double vol = d.volume_weight();
  const int jmax = d.dimension() == 2 ? d.ny() + 1 : 0;
  auto couple = [&](std::optional<Eigen::Index> a, std::optional<Eigen::Index> b, double h) {
    if (!a && !b) return;
    if (!zero_extension && (!a || !b)) return;
    const double c = vol / (h * h);
    if (a) m(*a, *a) += c;
    if (b) m(*b, *b) += c;
    if (a && b) {
      m(*a, *b) -= c;
      m(*b, *a) -= c;
    }
  };
  for (int j = 0; j <= jmax; ++j) {
    for (int i = 0; i <= d.nx() + 1; ++i) {
      if (i + 1 <= d.nx() + 1) couple(d.node_at(i, j), d.node_at(i + 1, j), d.hx());
      if (d.dimension() == 2 && j + 1 <= jmax) couple(d.node_at(i, j), d.node_at(i, j + 1), d.hy());
    }
  }
  if (regime.kind == RegimeKind::robin)
    for (const auto& b : d.boundary_nodes()) m(b.node, b.node) += regime.beta * b.weight;
  return m;
}

EigenResult dense_linear_reference(const Domain& d, const BoundaryRegime& regime) {
  const Eigen::MatrixXd a = assemble_linear_operator(d, regime) / d.volume_weight();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
  if (solver.info() != Eigen::Success) throw Error("dense eigensolve failed");
  const auto& values = solver.eigenvalues();
  Eigen::Index pick = 0;
  if (regime.kind == RegimeKind::neumann) {
    const double floor = 1e-9 * std::abs(values[values.size() - 1]);
    while (pick + 1 < values.size() && values[pick] <= floor) ++pick;
  }
  EigenResult res;
  res.lambda = values[pick];
  res.mu = res.lambda;
  Field v = solver.eigenvectors().col(pick);
  v /= lp_norm(d, v, 2.0);
  res.extremal = extremal_sign_normalize(v, regime.kind, 1e-8);
  res.residual = (a * res.extremal - res.lambda * res.extremal).norm() / (res.lambda * res.extremal.norm());
  return res;
}

}  // namespace dnflow
