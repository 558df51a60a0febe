#pragma once

#include "dnflow/operators.hpp"

#include <limits>
#include <optional>
#include <vector>

namespace dnflow {

/// Per-step monotone quantities and estimators. NaN marks a value that was
/// not computed (dual quantities when disabled, rates at k = 0).
struct DiagnosticsRow {
  static constexpr double none = std::numeric_limits<double>::quiet_NaN();

  long k = 0;
  double t = 0.0;
  double Np = 0.0;        ///< int |u^k|^p
  double energy = 0.0;    ///< regime energy (1/p) int |Du^k|^p (+ boundary term)
  double rayleigh = none;  ///< p * energy / Np
  double dual_q = none;    ///< int |J_p u^k|^q / ||J_p u^k||_*^q
  double lambda_decay = none;
  double lambda_rayleigh = none;
  double mu_from_dual = none;
  double conservation = 0.0;  ///< int J_p(u^k)
  double energy_residual = 0.0;
};

/// States u^0 .. u^K of the implicit scheme with uniform step tau.
struct FlowTrajectory {
  double tau = 0.0;
  EnergyParams params{};
  BoundaryRegime regime{};
  std::vector<Field> states;
  std::vector<DiagnosticsRow> diagnostics;
  /// Neumann only: the initial datum after the zero-p-mean shift.
  std::optional<Field> projected_initial;

  long steps() const { return static_cast<long>(states.size()) - 1; }
  double final_time() const { return tau * static_cast<double>(steps()); }
};

}  // namespace dnflow
