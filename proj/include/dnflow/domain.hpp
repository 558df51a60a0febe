#pragma once

#include "dnflow/field.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace dnflow {

enum class DomainKind { interval, rectangle, masked };

const char* to_string(DomainKind kind);

/// Classification of a point of the padded grid (interior box plus a ghost ring).
enum class NodeClass : std::uint8_t { interior, boundary, exterior };

struct BoundaryNode {
  Eigen::Index node;  ///< field index of the interior node adjacent to the boundary
  double weight;      ///< surface weight h^{n-1}
};

/// 0/1 occupancy grid. Row r maps to the y-index r + 1, column c to the x-index c + 1.
struct Bitmap {
  int rows = 0;
  int cols = 0;
  double h = 0.0;
  std::vector<std::uint8_t> cells;  // row-major, rows * cols

  bool at(int r, int c) const { return cells[static_cast<std::size_t>(r) * cols + c] != 0; }
};

/// Reads "rows cols h" followed by rows lines of 0/1 characters.
Bitmap read_bitmap(std::istream& in);
Bitmap read_bitmap_file(const std::string& path);

/// Uniform grid discretization of a bounded region. Only interior nodes carry
/// unknowns; homogeneous Dirichlet data lives implicitly on the ghost ring.
/// Immutable after construction.
class Domain {
 public:
  /// n interior nodes x_i = i h on (0, 1), h = 1 / (n + 1).
  static Domain interval(int n);
  /// nx * ny interior nodes on (0, lx) x (0, ly), hx = lx / (nx + 1), hy = ly / (ny + 1).
  static Domain rectangle(int nx, int ny, double lx, double ly);
  /// Interior nodes are the set cells of the bitmap, spacing bitmap.h in both axes.
  static Domain masked(const Bitmap& bitmap);

  DomainKind kind() const { return kind_; }
  int dimension() const { return kind_ == DomainKind::interval ? 1 : 2; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(coords_.size()); }

  double hx() const { return hx_; }
  double hy() const { return hy_; }
  double h() const { return hx_; }

  /// Cell measure attached to each interior node: h (1-D) or hx * hy (2-D).
  double volume_weight() const { return dimension() == 1 ? hx_ : hx_ * hy_; }

  /// Interior box extents; the padded grid is (nx + 2) x (ny + 2) (ny = 1 for intervals,
  /// which are padded only along x).
  int nx() const { return nx_; }
  int ny() const { return ny_; }

  const std::vector<std::array<double, 2>>& coordinates() const { return coords_; }
  std::span<const BoundaryNode> boundary_nodes() const { return boundary_; }

  /// Field index of padded-grid point (i, j), or nullopt when it is not interior.
  /// i in [0, nx + 1]; j in [0, ny + 1] for 2-D and j == 0 for intervals.
  std::optional<Eigen::Index> node_at(int i, int j) const;
  NodeClass classify(int i, int j) const;

  /// Padded-grid position of a field index.
  std::array<int, 2> grid_position(Eigen::Index node) const { return positions_[node]; }

  bool supports_robin() const { return kind_ != DomainKind::masked; }

 private:
  Domain() = default;
  void finalize();

  DomainKind kind_ = DomainKind::interval;
  int nx_ = 0;
  int ny_ = 1;
  double hx_ = 0.0;
  double hy_ = 0.0;
  std::vector<std::int64_t> index_;  // padded grid -> field index or -1
  std::vector<NodeClass> classes_;
  std::vector<std::array<double, 2>> coords_;
  std::vector<std::array<int, 2>> positions_;
  std::vector<BoundaryNode> boundary_;

  int padded_rows() const { return dimension() == 1 ? 1 : ny_ + 2; }
  std::size_t flat(int i, int j) const {
    return static_cast<std::size_t>(dimension() == 1 ? 0 : j) * (nx_ + 2) + i;
  }
};

/// Discrete integral of |u|^r: sum of volume_weight * |u_i|^r.
double integrate_power(const Domain& d, const Field& u, double r);

/// Weighted L^r norm (integrate_power)^{1/r}.
double lp_norm(const Domain& d, const Field& u, double r);

/// Sum of volume_weight * u_i.
double integrate(const Domain& d, const Field& u);

void check_shape(const Domain& d, const Field& u);

}  // namespace dnflow
