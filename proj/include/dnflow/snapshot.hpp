#pragma once

#include "dnflow/oracle.hpp"
#include "dnflow/operators.hpp"

#include <iosfwd>
#include <string>

namespace dnflow {

/// Plain-text field dump: a header of `name value...` lines (kind, dims, h, p,
/// regime, k, tau), a `values` marker, then one node value per line in field order
/// (row-major, x fastest), printed with 17 significant digits.
struct Snapshot {
  std::string kind;
  std::vector<int> dims;
  std::vector<double> h;
  double p = 0.0;
  std::string regime;
  long k = 0;
  double tau = 0.0;
  Field values;
};

void write_snapshot(std::ostream& out, const Domain& d, const BoundaryRegime& regime, double p, long k, double tau,
                    const Field& u);
/// Throws IoError when the file cannot be written.
void write_snapshot_file(const std::string& path, const Domain& d, const BoundaryRegime& regime, double p, long k,
                         double tau, const Field& u);

/// Throws ParseError on malformed input.
Snapshot read_snapshot(std::istream& in);
Snapshot read_snapshot_file(const std::string& path);

/// `lambda mu residual iterations`
std::string eigen_summary(const EigenResult& r);

}  // namespace dnflow
