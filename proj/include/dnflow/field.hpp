#pragma once

#include <Eigen/Core>

#include <cmath>

namespace dnflow {

/// Nodal values on the interior nodes of a Domain.
using Field = Eigen::VectorXd;

/// The odd power map z -> |z|^{p-2} z. Zero at the origin for every p > 1.
inline double jp(double z, double p) {
  if (z == 0.0) return 0.0;
  return std::copysign(std::pow(std::abs(z), p - 1.0), z);
}

inline Field jp(const Field& u, double p) {
  Field out(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) out[i] = jp(u[i], p);
  return out;
}

/// Hoelder conjugate p / (p - 1).
inline double conjugate_exponent(double p) { return p / (p - 1.0); }

}  // namespace dnflow
