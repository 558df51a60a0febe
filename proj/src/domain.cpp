#include "dnflow/domain.hpp"

#include "dnflow/errors.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>

namespace dnflow {

const char* to_string(DomainKind kind) {
  switch (kind) {
    case DomainKind::interval: return "interval";
    case DomainKind::rectangle: return "rectangle";
    case DomainKind::masked: return "masked";
  }
  return "unknown";
}

Domain Domain::interval(int n) {
  if (n < 3) throw InvalidResolution("interval needs at least 3 interior nodes, got " + std::to_string(n));
  Domain d;
  d.kind_ = DomainKind::interval;
  d.nx_ = n;
  d.ny_ = 1;
  d.hx_ = d.hy_ = 1.0 / (n + 1);
  d.index_.assign(static_cast<std::size_t>(n) + 2, -1);
  for (int i = 1; i <= n; ++i) d.index_[i] = i - 1;
  d.finalize();
  d.boundary_ = {{0, 1.0}, {n - 1, 1.0}};
  return d;
}

Domain Domain::rectangle(int nx, int ny, double lx, double ly) {
  if (nx < 3 || ny < 3)
    throw InvalidResolution("rectangle needs at least 3x3 interior nodes, got " + std::to_string(nx) +
                            "x" + std::to_string(ny));
  if (!(lx > 0.0) || !(ly > 0.0)) throw InvalidResolution("rectangle side lengths must be positive");
  Domain d;
  d.kind_ = DomainKind::rectangle;
  d.nx_ = nx;
  d.ny_ = ny;
  d.hx_ = lx / (nx + 1);
  d.hy_ = ly / (ny + 1);
  d.index_.assign(static_cast<std::size_t>(nx + 2) * (ny + 2), -1);
  std::int64_t next = 0;
  for (int j = 1; j <= ny; ++j)
    for (int i = 1; i <= nx; ++i) d.index_[d.flat(i, j)] = next++;
  d.finalize();
  // Corner nodes sit on two edges and are listed once per edge.
  for (int i = 1; i <= nx; ++i) d.boundary_.push_back({*d.node_at(i, 1), d.hx_});
  for (int i = 1; i <= nx; ++i) d.boundary_.push_back({*d.node_at(i, ny), d.hx_});
  for (int j = 1; j <= ny; ++j) d.boundary_.push_back({*d.node_at(1, j), d.hy_});
  for (int j = 1; j <= ny; ++j) d.boundary_.push_back({*d.node_at(nx, j), d.hy_});
  return d;
}

Domain Domain::masked(const Bitmap& bm) {
  if (bm.rows <= 0 || bm.cols <= 0 || bm.cells.size() != static_cast<std::size_t>(bm.rows) * bm.cols)
    throw EmptyDomain("bitmap has no cells");
  if (!(bm.h > 0.0)) throw InvalidResolution("bitmap spacing must be positive");
  Domain d;
  d.kind_ = DomainKind::masked;
  d.nx_ = bm.cols;
  d.ny_ = bm.rows;
  d.hx_ = d.hy_ = bm.h;
  d.index_.assign(static_cast<std::size_t>(bm.cols + 2) * (bm.rows + 2), -1);
  std::int64_t next = 0;
  for (int r = 0; r < bm.rows; ++r)
    for (int c = 0; c < bm.cols; ++c)
      if (bm.at(r, c)) d.index_[d.flat(c + 1, r + 1)] = next++;
  if (next == 0) throw EmptyDomain("bitmap has no set cells");
  for (int r = 0; r < bm.rows; ++r) {
    for (int c = 0; c < bm.cols; ++c) {
      if (!bm.at(r, c)) continue;
      const bool connected = (c > 0 && bm.at(r, c - 1)) || (c + 1 < bm.cols && bm.at(r, c + 1)) ||
                             (r > 0 && bm.at(r - 1, c)) || (r + 1 < bm.rows && bm.at(r + 1, c));
      if (!connected)
        throw InvalidResolution("isolated cell at row " + std::to_string(r) + ", column " + std::to_string(c));
    }
  }
  d.finalize();
  return d;
}

void Domain::finalize() {
  const int rows = padded_rows();
  const int cols = nx_ + 2;
  classes_.assign(index_.size(), NodeClass::exterior);
  coords_.clear();
  positions_.clear();
  std::int64_t count = 0;
  for (auto v : index_) count += v >= 0;
  coords_.resize(static_cast<std::size_t>(count));
  positions_.resize(static_cast<std::size_t>(count));
  for (int j = 0; j < rows; ++j) {
    for (int i = 0; i < cols; ++i) {
      const auto id = index_[flat(i, j)];
      if (id >= 0) {
        classes_[flat(i, j)] = NodeClass::interior;
        coords_[id] = {i * hx_, dimension() == 1 ? 0.0 : j * hy_};
        positions_[id] = {i, j};
      }
    }
  }
  // Non-interior padded points touching the interior carry the zero Dirichlet data.
  for (int j = 0; j < rows; ++j) {
    for (int i = 0; i < cols; ++i) {
      if (classes_[flat(i, j)] == NodeClass::interior) continue;
      bool touches = false;
      const int di[4] = {1, -1, 0, 0};
      const int dj[4] = {0, 0, 1, -1};
      for (int k = 0; k < 4; ++k) {
        const int a = i + di[k];
        const int b = j + dj[k];
        if (a < 0 || a >= cols || b < 0 || b >= rows) continue;
        if (dimension() == 1 && b != 0) continue;
        touches = touches || classes_[flat(a, b)] == NodeClass::interior;
      }
      if (touches) classes_[flat(i, j)] = NodeClass::boundary;
    }
  }
}

std::optional<Eigen::Index> Domain::node_at(int i, int j) const {
  if (i < 0 || i > nx_ + 1) return std::nullopt;
  if (dimension() == 1 ? j != 0 : (j < 0 || j > ny_ + 1)) return std::nullopt;
  const auto id = index_[flat(i, j)];
  if (id < 0) return std::nullopt;
  return static_cast<Eigen::Index>(id);
}

NodeClass Domain::classify(int i, int j) const {
  if (i < 0 || i > nx_ + 1) return NodeClass::exterior;
  if (dimension() == 1 ? j != 0 : (j < 0 || j > ny_ + 1)) return NodeClass::exterior;
  return classes_[flat(i, j)];
}

Bitmap read_bitmap(std::istream& in) {
  Bitmap bm;
  std::string line;
  if (!std::getline(in, line)) throw IoError("bitmap: missing header line");
  std::istringstream header(line);
  if (!(header >> bm.rows >> bm.cols >> bm.h) || bm.rows <= 0 || bm.cols <= 0)
    throw IoError("bitmap: header must read \"rows cols h\"");
  bm.cells.reserve(static_cast<std::size_t>(bm.rows) * bm.cols);
  for (int r = 0; r < bm.rows; ++r) {
    if (!std::getline(in, line)) throw IoError("bitmap: expected " + std::to_string(bm.rows) + " rows");
    int seen = 0;
    for (char ch : line) {
      if (ch == '0' || ch == '1') {
        bm.cells.push_back(static_cast<std::uint8_t>(ch == '1'));
        ++seen;
      } else if (ch != ' ' && ch != '\t' && ch != '\r') {
        throw IoError("bitmap: unexpected character in row " + std::to_string(r));
      }
    }
    if (seen != bm.cols) throw IoError("bitmap: row " + std::to_string(r) + " has wrong length");
  }
  return bm;
}

Bitmap read_bitmap_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open bitmap file " + path);
  return read_bitmap(in);
}

void check_shape(const Domain& d, const Field& u) {
  if (u.size() != d.size())
    throw ShapeError("field has " + std::to_string(u.size()) + " values, domain has " +
                     std::to_string(d.size()) + " nodes");
}

double integrate_power(const Domain& d, const Field& u, double r) {
  check_shape(d, u);
  if (!(r > 0.0)) throw InvalidParameter("integrate_power exponent must be positive");
  double sum = 0.0;
  if (r == 2.0) {
    sum = u.squaredNorm();
  } else {
    for (Eigen::Index i = 0; i < u.size(); ++i) sum += std::pow(std::abs(u[i]), r);
  }
  return d.volume_weight() * sum;
}

double lp_norm(const Domain& d, const Field& u, double r) { return std::pow(integrate_power(d, u, r), 1.0 / r); }

double integrate(const Domain& d, const Field& u) {
  check_shape(d, u);
  return d.volume_weight() * u.sum();
}

}  // namespace dnflow
