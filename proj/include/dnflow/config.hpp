#pragma once

#include "dnflow/elliptic.hpp"
#include "dnflow/flow.hpp"
#include "dnflow/operators.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace dnflow {

/// Batch run description read from `key = value` lines.
struct RunConfig {
  std::string domain_kind = "interval";  // interval | rectangle | masked
  long n = 200;
  long ny = 0;  // 0: same as n
  double lx = 1.0;
  double ly = 1.0;
  std::string mask_path;

  double p = 2.0;
  std::string regime_kind = "dirichlet";  // dirichlet | robin | neumann | fractional
  double beta = 1.0;
  double s = 0.5;

  std::optional<double> tau;  // unset: automatic, 1 / (2 lambda) from a bootstrap run
  long steps = 200;
  double grad_tol = 1e-9;
  double epsilon = 1e-6;
  long max_iters = 200000;
  std::uint64_t seed = 1;

  std::string init_kind = "constant_one";  // constant_one | extremal | random | file
  std::string init_path;
  std::string out_dir = ".";
  std::vector<long> snapshots;

  double eigen_rel_tol = 1e-8;
  long eigen_max_steps = 5000;
  long verify_samples = 200;
  long verify_steps = 200;

  /// Cross-field checks (regime vs domain kind, epsilon vs p, ...). Throws ParseError.
  void validate() const;
};

/// Applies one assignment; throws ParseError naming the line and key.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value, long line = 0);

RunConfig parse_config(std::istream& in);
RunConfig parse_config_text(const std::string& text);
/// Throws IoError when the file cannot be read.
RunConfig parse_config_file(const std::string& path);

/// Keys accepted by parse_config, in documentation order.
const std::vector<std::string>& config_keys();

Domain build_domain(const RunConfig& cfg);
BoundaryRegime build_regime(const RunConfig& cfg);
EnergyParams build_params(const RunConfig& cfg);
SolverConfig build_solver(const RunConfig& cfg);
LimitOptions build_limit_options(const RunConfig& cfg);

}  // namespace dnflow
