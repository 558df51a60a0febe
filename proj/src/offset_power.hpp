#pragma once

#include <cmath>

namespace dnflow::detail {

// (z^2 + eps^2)^{p/2} - eps^p given t_pow = (z^2 + eps^2)^{p/2}. Below the
// regularization scale the difference is formed without cancellation, so it
// is exactly zero at z = 0.
inline double offset_power(double z2, double eps2, double t_pow, double eps_p, double p) {
  if (eps2 > 0.0 && z2 < eps2) return eps_p * std::expm1(0.5 * p * std::log1p(z2 / eps2));
  return t_pow - eps_p;
}

}  // namespace dnflow::detail
