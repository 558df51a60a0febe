#pragma once

#include "dnflow/domain.hpp"

#include <vector>

namespace dnflow {

/// Pair weights and exterior tail of the 1-D fractional energy on (0, 1)
/// with zero data on the complement.
///
///   w_ij    = h^2 / |x_i - x_j|^{1 + p s}                 (i != j)
///   kappa_i = (x_i^{-p s} + (1 - x_i)^{-p s}) / (p s)
///
/// kappa_i is the exact integral of |x_i - y|^{-1-ps} over y outside (0, 1).
class FractionalKernel {
 public:
  FractionalKernel(const Domain& d, double s, double p);

  double s() const { return s_; }
  double p() const { return p_; }
  double h() const { return h_; }
  Eigen::Index size() const { return n_; }

  double weight(Eigen::Index i, Eigen::Index j) const { return i == j ? 0.0 : weights_[index(i, j)]; }
  double exterior(Eigen::Index i) const { return exterior_[i]; }

  /// E = (1/p) [ sum_{i != j} w_ij phi(u_i - u_j) + 2 sum_i h kappa_i phi(u_i) ]
  /// with phi(z) = (z^2 + eps^2)^{p/2} - eps^p.
  double energy(const Field& u, double eps) const;
  /// Energy and dE/du_i (not divided by the volume weight).
  double energy_and_partials(const Field& u, double eps, Field& partials) const;
  /// d^2 E / du_i^2 (not divided by the volume weight).
  void hessian_diagonal(const Field& u, double eps, Field& diag) const;

 private:
  std::size_t index(Eigen::Index i, Eigen::Index j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j);
  }

  double s_;
  double p_;
  double h_;
  Eigen::Index n_;
  std::vector<double> weights_;  // dense n x n, zero diagonal
  std::vector<double> exterior_;
};

FractionalKernel build_kernel(const Domain& d, double s, double p);

}  // namespace dnflow
