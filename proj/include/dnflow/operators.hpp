#pragma once

#include "dnflow/domain.hpp"
#include "dnflow/fractional.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dnflow {

enum class RegimeKind { dirichlet, robin, neumann, fractional_dirichlet };

const char* to_string(RegimeKind kind);

/// Boundary condition selecting the energy form and constraint set.
struct BoundaryRegime {
  RegimeKind kind = RegimeKind::dirichlet;
  double beta = 0.0;  ///< Robin coefficient, > 0
  double s = 0.0;     ///< fractional order in (0, 1)

  static BoundaryRegime dirichlet() { return {RegimeKind::dirichlet, 0.0, 0.0}; }
  static BoundaryRegime robin(double beta) { return {RegimeKind::robin, beta, 0.0}; }
  static BoundaryRegime neumann() { return {RegimeKind::neumann, 0.0, 0.0}; }
  static BoundaryRegime fractional(double s) { return {RegimeKind::fractional_dirichlet, 0.0, s}; }

  void validate() const;
  /// Throws UnsupportedRegime when the domain kind cannot host this regime.
  void check_compatible(const Domain& d) const;
  std::string describe() const;
};

/// Exponent and regularization. epsilon is a length in field units; the
/// solvers apply it relative to the current field scale (see scaled_epsilon).
struct EnergyParams {
  double p = 2.0;
  double epsilon = 0.0;

  double q() const { return conjugate_exponent(p); }
  void validate() const;
};

/// One forward difference (u_to - u_from) / h; -1 marks the implicit zero value.
struct Difference {
  Eigen::Index from;
  Eigen::Index to;
  double inv_h;
};

/// Cell carrying a (partial) forward-difference gradient vector.
struct GradientCell {
  double weight;
  int count;
  Difference parts[2];
};

/// The discrete energy of a (domain, regime, p) triple.
///
/// Local regimes:  E = (1/p) sum_cells w (|grad u|^2 + eps^2)^{p/2} - eps^p
///                 (+ (beta/p) sum_boundary sigma ((u_b^2 + eps^2)^{p/2} - eps^p) for Robin)
/// Fractional:     see FractionalKernel.
///
/// The eps^p offsets keep E(0) = 0 without changing the gradient.
class EnergyOperator {
 public:
  EnergyOperator(const Domain& d, const BoundaryRegime& regime, double p);

  const Domain& domain() const { return domain_; }
  const BoundaryRegime& regime() const { return regime_; }
  double p() const { return p_; }
  Eigen::Index size() const { return domain_.size(); }
  double volume_weight() const { return domain_.volume_weight(); }

  double energy(const Field& u, double eps) const;
  /// Returns E and writes the density dE/du_i / volume_weight into grad.
  double energy_and_gradient(const Field& u, double eps, Field& grad) const;
  Field gradient(const Field& u, double eps) const;
  /// Diagonal of the Hessian, in the same density units as the gradient.
  void hessian_diagonal(const Field& u, double eps, Field& diag) const;

  const std::vector<GradientCell>& cells() const { return cells_; }
  const std::optional<FractionalKernel>& kernel() const { return kernel_; }

 private:
  double local_energy(const Field& u, double eps, Field* partials) const;

  Domain domain_;
  BoundaryRegime regime_;
  double p_;
  std::vector<GradientCell> cells_;
  std::optional<FractionalKernel> kernel_;
};

double energy(const Domain& d, const Field& u, const EnergyParams& params, const BoundaryRegime& regime);
Field energy_gradient(const Domain& d, const Field& u, const EnergyParams& params, const BoundaryRegime& regime);

/// Discrete boundary integral sum_b sigma_b |u_b|^p. Interval and rectangle only.
double trace_lp(const Domain& d, const Field& u, double p);

/// Regularization length used for a field of the given scale (its L^p norm).
inline double scaled_epsilon(const EnergyParams& params, double scale) { return params.epsilon * scale; }

}  // namespace dnflow
