#include "dnflow/operators.hpp"

#include "dnflow/errors.hpp"
#include "offset_power.hpp"

#include <cmath>
#include <sstream>

namespace dnflow {

const char* to_string(RegimeKind kind) {
  switch (kind) {
    case RegimeKind::dirichlet: return "dirichlet";
    case RegimeKind::robin: return "robin";
    case RegimeKind::neumann: return "neumann";
    case RegimeKind::fractional_dirichlet: return "fractional";
  }
  return "unknown";
}

void BoundaryRegime::validate() const {
  if (kind == RegimeKind::robin && !(beta > 0.0)) throw InvalidParameter("Robin coefficient beta must be positive");
  if (kind == RegimeKind::fractional_dirichlet && !(s > 0.0 && s < 1.0))
    throw InvalidParameter("fractional order s must lie strictly inside (0, 1)");
}

void BoundaryRegime::check_compatible(const Domain& d) const {
  validate();
  if (kind == RegimeKind::robin && !d.supports_robin())
    throw UnsupportedRegime("Robin regime requires an interval or rectangle domain");
  if (kind == RegimeKind::fractional_dirichlet && d.kind() != DomainKind::interval)
    throw UnsupportedRegime("fractional regime is only available on interval domains");
}

std::string BoundaryRegime::describe() const {
  std::ostringstream out;
  out.precision(17);
  out << to_string(kind);
  if (kind == RegimeKind::robin) out << " beta=" << beta;
  if (kind == RegimeKind::fractional_dirichlet) out << " s=" << s;
  return out.str();
}

void EnergyParams::validate() const {
  if (!(p > 1.0) || !std::isfinite(p)) throw InvalidParameter("exponent p must be a finite number > 1");
  if (!(epsilon >= 0.0)) throw InvalidParameter("epsilon must be nonnegative");
  if (epsilon == 0.0 && p < 2.0) throw InvalidParameter("epsilon = 0 requires p >= 2");
}

namespace {

std::vector<GradientCell> build_cells(const Domain& d, RegimeKind kind) {
  std::vector<GradientCell> cells;
  const double weight = d.volume_weight();
  const bool two_d = d.dimension() == 2;
  const double inv_hx = 1.0 / d.hx();
  const double inv_hy = 1.0 / d.hy();
  auto idx = [&](int i, int j) -> Eigen::Index {
    auto n = d.node_at(i, j);
    return n ? *n : -1;
  };
  if (kind == RegimeKind::dirichlet) {
    // Zero extension: every difference touching an interior node is kept.
    const int jmax = two_d ? d.ny() : 0;
    for (int j = 0; j <= jmax; ++j) {
      for (int i = 0; i <= d.nx(); ++i) {
        GradientCell c{weight, 0, {}};
        const auto self = idx(i, j);
        const auto right = idx(i + 1, j);
        if (self >= 0 || right >= 0) c.parts[c.count++] = {self, right, inv_hx};
        if (two_d) {
          const auto up = idx(i, j + 1);
          if (self >= 0 || up >= 0) c.parts[c.count++] = {self, up, inv_hy};
        }
        if (c.count > 0) cells.push_back(c);
      }
    }
  } else {
    // No-flux: only differences between two interior nodes.
    for (Eigen::Index n = 0; n < d.size(); ++n) {
      const auto [i, j] = d.grid_position(n);
      GradientCell c{weight, 0, {}};
      const auto right = idx(i + 1, j);
      if (right >= 0) c.parts[c.count++] = {n, right, inv_hx};
      if (two_d) {
        const auto up = idx(i, j + 1);
        if (up >= 0) c.parts[c.count++] = {n, up, inv_hy};
      }
      if (c.count > 0) cells.push_back(c);
    }
  }
  return cells;
}

}  // namespace

EnergyOperator::EnergyOperator(const Domain& d, const BoundaryRegime& regime, double p)
    : domain_(d), regime_(regime), p_(p) {
  if (!(p > 1.0)) throw InvalidParameter("exponent p must exceed 1");
  regime.check_compatible(d);
  if (regime.kind == RegimeKind::fractional_dirichlet) {
    kernel_.emplace(d, regime.s, p);
  } else {
    cells_ = build_cells(d, regime.kind);
  }
}

double EnergyOperator::local_energy(const Field& u, double eps, Field* partials) const {
  const double eps2 = eps * eps;
  const double eps_p = eps > 0.0 ? std::pow(eps, p_) : 0.0;
  const double half_exp = 0.5 * (p_ - 2.0);
  const bool quadratic = p_ == 2.0;
  if (partials) partials->setZero(u.size());
  auto value = [&](Eigen::Index k) { return k >= 0 ? u[k] : 0.0; };
  double sum = 0.0;
  for (const auto& c : cells_) {
    double diffs[2];
    double z2 = 0.0;
    for (int m = 0; m < c.count; ++m) {
      const auto& part = c.parts[m];
      diffs[m] = (value(part.to) - value(part.from)) * part.inv_h;
      z2 += diffs[m] * diffs[m];
    }
    const double t = z2 + eps2;
    const double f = quadratic ? 1.0 : (t > 0.0 ? std::pow(t, half_exp) : 0.0);
    sum += c.weight * detail::offset_power(z2, eps2, f * t, eps_p, p_);
    if (partials) {
      for (int m = 0; m < c.count; ++m) {
        const auto& part = c.parts[m];
        const double flux = c.weight * f * diffs[m] * part.inv_h;
        if (part.to >= 0) (*partials)[part.to] += flux;
        if (part.from >= 0) (*partials)[part.from] -= flux;
      }
    }
  }
  if (regime_.kind == RegimeKind::robin) {
    double trace = 0.0;
    for (const auto& b : domain_.boundary_nodes()) {
      const double ub = u[b.node];
      const double t = ub * ub + eps2;
      const double f = quadratic ? 1.0 : (t > 0.0 ? std::pow(t, half_exp) : 0.0);
      trace += b.weight * detail::offset_power(ub * ub, eps2, f * t, eps_p, p_);
      if (partials) (*partials)[b.node] += regime_.beta * b.weight * f * ub;
    }
    sum += regime_.beta * trace;
  }
  return sum / p_;
}

double EnergyOperator::energy(const Field& u, double eps) const {
  check_shape(domain_, u);
  if (kernel_) return kernel_->energy(u, eps);
  return local_energy(u, eps, nullptr);
}

double EnergyOperator::energy_and_gradient(const Field& u, double eps, Field& grad) const {
  check_shape(domain_, u);
  const double e = kernel_ ? kernel_->energy_and_partials(u, eps, grad) : local_energy(u, eps, &grad);
  grad /= domain_.volume_weight();
  return e;
}

Field EnergyOperator::gradient(const Field& u, double eps) const {
  Field g(u.size());
  energy_and_gradient(u, eps, g);
  return g;
}

void EnergyOperator::hessian_diagonal(const Field& u, double eps, Field& diag) const {
  check_shape(domain_, u);
  if (kernel_) {
    kernel_->hessian_diagonal(u, eps, diag);
    diag /= domain_.volume_weight();
    return;
  }
  const double eps2 = eps * eps;
  const double half_exp = 0.5 * (p_ - 2.0);
  const bool quadratic = p_ == 2.0;
  diag.setZero(u.size());
  auto value = [&](Eigen::Index k) { return k >= 0 ? u[k] : 0.0; };
  for (const auto& c : cells_) {
    double diffs[2];
    double t = eps2;
    for (int m = 0; m < c.count; ++m) {
      const auto& part = c.parts[m];
      diffs[m] = (value(part.to) - value(part.from)) * part.inv_h;
      t += diffs[m] * diffs[m];
    }
    if (!(t > 0.0) && !quadratic) continue;
    const double f = quadratic ? 1.0 : std::pow(t, half_exp);
    // d/du_k of the cell gradient is a vector a_k; a node can sit in both parts.
    // Curvature along e_k: w f (|a_k|^2 + (p - 2) (G . a_k)^2 / t).
    Eigen::Index nodes[4];
    double a[4][2] = {};
    int count = 0;
    auto slot = [&](Eigen::Index k) {
      for (int i = 0; i < count; ++i)
        if (nodes[i] == k) return i;
      nodes[count] = k;
      return count++;
    };
    for (int m = 0; m < c.count; ++m) {
      const auto& part = c.parts[m];
      if (part.to >= 0) a[slot(part.to)][m] += part.inv_h;
      if (part.from >= 0) a[slot(part.from)][m] -= part.inv_h;
    }
    for (int i = 0; i < count; ++i) {
      double norm2 = 0.0, along = 0.0;
      for (int m = 0; m < c.count; ++m) {
        norm2 += a[i][m] * a[i][m];
        along += a[i][m] * diffs[m];
      }
      const double bend = quadratic ? norm2 : norm2 + (p_ - 2.0) * along * along / t;
      diag[nodes[i]] += c.weight * f * bend;
    }
  }
  if (regime_.kind == RegimeKind::robin) {
    for (const auto& b : domain_.boundary_nodes()) {
      const double ub = u[b.node];
      const double t = ub * ub + eps2;
      if (!(t > 0.0) && !quadratic) continue;
      const double f = quadratic ? 1.0 : std::pow(t, half_exp);
      const double bend = quadratic ? 1.0 : 1.0 + (p_ - 2.0) * ub * ub / t;
      diag[b.node] += regime_.beta * b.weight * f * bend;
    }
  }
  diag /= domain_.volume_weight();
}

double energy(const Domain& d, const Field& u, const EnergyParams& params, const BoundaryRegime& regime) {
  params.validate();
  return EnergyOperator(d, regime, params.p).energy(u, params.epsilon);
}

Field energy_gradient(const Domain& d, const Field& u, const EnergyParams& params, const BoundaryRegime& regime) {
  params.validate();
  return EnergyOperator(d, regime, params.p).gradient(u, params.epsilon);
}

double trace_lp(const Domain& d, const Field& u, double p) {
  if (!d.supports_robin()) throw UnsupportedRegime("boundary trace is not defined on masked domains");
  check_shape(d, u);
  double sum = 0.0;
  for (const auto& b : d.boundary_nodes()) sum += b.weight * std::pow(std::abs(u[b.node]), p);
  return sum;
}

}  // namespace dnflow
