#include "dnflow/fractional.hpp"

#include "dnflow/errors.hpp"
#include "offset_power.hpp"

#include <cmath>

namespace dnflow {

FractionalKernel::FractionalKernel(const Domain& d, double s, double p) : s_(s), p_(p), h_(d.h()), n_(d.size()) {
  if (d.kind() != DomainKind::interval)
    throw UnsupportedRegime("fractional regime is only available on interval domains");
  if (!(s > 0.0 && s < 1.0)) throw InvalidParameter("fractional order s must lie in (0, 1)");
  if (!(p > 1.0)) throw InvalidParameter("exponent p must exceed 1");
  const double ps = p * s;
  const auto& x = d.coordinates();
  weights_.assign(static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_), 0.0);
  exterior_.resize(static_cast<std::size_t>(n_));
  for (Eigen::Index i = 0; i < n_; ++i) {
    for (Eigen::Index j = i + 1; j < n_; ++j) {
      const double w = h_ * h_ / std::pow(std::abs(x[i][0] - x[j][0]), 1.0 + ps);
      weights_[index(i, j)] = w;
      weights_[index(j, i)] = w;
    }
    exterior_[i] = (std::pow(x[i][0], -ps) + std::pow(1.0 - x[i][0], -ps)) / ps;
  }
}

double FractionalKernel::energy(const Field& u, double eps) const {
  Field unused(n_);
  return energy_and_partials(u, eps, unused);
}

// Pairs are visited once (i < j) and counted twice; the serial order i-major, j-minor
// fixes the reduction order.
double FractionalKernel::energy_and_partials(const Field& u, double eps, Field& partials) const {
  const double eps2 = eps * eps;
  const double eps_p = eps > 0.0 ? std::pow(eps, p_) : 0.0;
  const double half_exp = 0.5 * (p_ - 2.0);
  const bool quadratic = p_ == 2.0;
  partials.setZero(n_);
  double pair_sum = 0.0;
  double tail_sum = 0.0;
  for (Eigen::Index i = 0; i < n_; ++i) {
    const double* wrow = &weights_[index(i, 0)];
    const double ui = u[i];
    double gi = 0.0;
    double row_sum = 0.0;
    for (Eigen::Index j = i + 1; j < n_; ++j) {
      const double z = ui - u[j];
      const double t = z * z + eps2;
      const double f = quadratic ? 1.0 : (t > 0.0 ? std::pow(t, half_exp) : 0.0);
      row_sum += wrow[j] * detail::offset_power(z * z, eps2, f * t, eps_p, p_);
      const double flux = wrow[j] * f * z;
      gi += flux;
      partials[j] -= 2.0 * flux;
    }
    pair_sum += row_sum;
    partials[i] += 2.0 * gi;
    const double t = ui * ui + eps2;
    const double f = quadratic ? 1.0 : (t > 0.0 ? std::pow(t, half_exp) : 0.0);
    tail_sum += exterior_[i] * detail::offset_power(ui * ui, eps2, f * t, eps_p, p_);
    partials[i] += 2.0 * h_ * exterior_[i] * f * ui;
  }
  return (2.0 * pair_sum + 2.0 * h_ * tail_sum) / p_;
}

void FractionalKernel::hessian_diagonal(const Field& u, double eps, Field& diag) const {
  const double eps2 = eps * eps;
  const double half_exp = 0.5 * (p_ - 2.0);
  const bool quadratic = p_ == 2.0;
  // phi''(z) / p = f (1 + (p - 2) z^2 / t)
  auto curvature = [&](double z) {
    if (quadratic) return 1.0;
    const double t = z * z + eps2;
    if (!(t > 0.0)) return 0.0;
    return std::pow(t, half_exp) * (1.0 + (p_ - 2.0) * z * z / t);
  };
  diag.setZero(n_);
  for (Eigen::Index i = 0; i < n_; ++i) {
    const double* wrow = &weights_[index(i, 0)];
    double di = 0.0;
    for (Eigen::Index j = i + 1; j < n_; ++j) {
      const double c = wrow[j] * curvature(u[i] - u[j]);
      di += c;
      diag[j] += 2.0 * c;
    }
    diag[i] += 2.0 * di + 2.0 * h_ * exterior_[i] * curvature(u[i]);
  }
}

FractionalKernel build_kernel(const Domain& d, double s, double p) { return FractionalKernel(d, s, p); }

}  // namespace dnflow
