#include "dnflow/snapshot.hpp"

#include "dnflow/errors.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace dnflow {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_snapshot(std::ostream& out, const Domain& d, const BoundaryRegime& regime, double p, long k, double tau,
                    const Field& u) {
  check_shape(d, u);
  out << "kind " << to_string(d.kind()) << '\n';
  if (d.dimension() == 1)
    out << "dims " << d.size() << '\n' << "h " << num(d.hx()) << '\n';
  else
    out << "dims " << d.nx() << ' ' << d.ny() << '\n' << "h " << num(d.hx()) << ' ' << num(d.hy()) << '\n';
  out << "p " << num(p) << '\n';
  out << "regime " << regime.describe() << '\n';
  out << "k " << k << '\n';
  out << "tau " << num(tau) << '\n';
  out << "values " << u.size() << '\n';
  for (Eigen::Index i = 0; i < u.size(); ++i) out << num(u[i]) << '\n';
}

void write_snapshot_file(const std::string& path, const Domain& d, const BoundaryRegime& regime, double p, long k,
                         double tau, const Field& u) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  write_snapshot(out, d, regime, p, k, tau, u);
  if (!out) throw IoError("write failed for " + path);
}

Snapshot read_snapshot(std::istream& in) {
  Snapshot s;
  std::string raw;
  std::size_t line = 0;
  long count = -1;
  while (count < 0 && std::getline(in, raw)) {
    ++line;
    std::istringstream ls(raw);
    std::string key;
    if (!(ls >> key)) continue;
    if (key == "kind") {
      ls >> s.kind;
    } else if (key == "dims") {
      int v;
      while (ls >> v) s.dims.push_back(v);
    } else if (key == "h") {
      double v;
      while (ls >> v) s.h.push_back(v);
    } else if (key == "p") {
      ls >> s.p;
    } else if (key == "regime") {
      std::getline(ls >> std::ws, s.regime);
    } else if (key == "k") {
      ls >> s.k;
    } else if (key == "tau") {
      ls >> s.tau;
    } else if (key == "values") {
      if (!(ls >> count) || count < 0) throw ParseError(line, key, "expected a node count");
      continue;
    } else {
      throw ParseError(line, key, "unknown snapshot header");
    }
    if (ls.fail() && !ls.eof()) throw ParseError(line, key, "malformed value");
  }
  if (count < 0) throw ParseError(line, "values", "missing values section");
  s.values.resize(count);
  for (long i = 0; i < count; ++i) {
    if (!(in >> s.values[i])) throw ParseError(line + 1 + i, "values", "expected " + std::to_string(count) + " values");
  }
  return s;
}

Snapshot read_snapshot_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open snapshot " + path);
  return read_snapshot(in);
}

std::string eigen_summary(const EigenResult& r) {
  return num(r.lambda) + ' ' + num(r.mu) + ' ' + num(r.residual) + ' ' + std::to_string(r.iterations);
}

}  // namespace dnflow
