#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "nearlattice/types.hpp"

namespace nearlattice {

enum class LatticeKind { Triangular2D, FCC, HCP };

std::string_view to_string(LatticeKind kind) noexcept;
LatticeKind parse_lattice_kind(std::string_view text);
int dimension_of(LatticeKind kind) noexcept;

/// A lattice point of the periodic cover: canonical site shifted by n * periods * wrap.
struct LatticeRef {
  int site = 0;
  Offset wrap = Offset::Zero();

  friend bool operator==(const LatticeRef& a, const LatticeRef& b) {
    return a.site == b.site && a.wrap == b.wrap;
  }
};

struct Site {
  Offset coord = Offset::Zero();  // integer coordinates along the period vectors
  int basis = 0;
  Point position = Point::Zero();
};

/// Unordered nearest-neighbour bond of the quotient; j is taken at offset `wrap`.
struct Edge {
  int i = 0;
  int j = 0;
  Offset wrap = Offset::Zero();
};

enum class CellKind { Triangle, Tetra, Octa };

/// Delaunay cell. Octahedra list their vertices so that (k, k + 3) are antipodal,
/// the splitting diagonal is (0, 3), and the ring 1-2-4-5 is the equator.
struct Cell {
  CellKind kind = CellKind::Triangle;
  std::array<LatticeRef, 6> vertices{};
  int vertex_count = 0;
  std::array<int, 2> diagonal{-1, -1};
  double reference_volume = 0.0;

  std::span<const LatticeRef> corners() const {
    return {vertices.data(), static_cast<std::size_t>(vertex_count)};
  }
};

/// Positively oriented simplex of the fixed triangulation.
struct Simplex {
  std::array<LatticeRef, 4> vertices{};
  int vertex_count = 0;  // d + 1
  int cell = -1;
  double reference_volume = 0.0;

  std::span<const LatticeRef> corners() const {
    return {vertices.data(), static_cast<std::size_t>(vertex_count)};
  }
};

struct CellCounts {
  int triangles = 0;
  int tetrahedra = 0;
  int octahedra = 0;
};

/// Periodic index lattice I_n with its bonds, Delaunay cells and triangulation.
/// Immutable after construction.
class Lattice {
 public:
  static Lattice build(LatticeKind kind, int n);

  LatticeKind kind() const noexcept { return kind_; }
  int dim() const noexcept { return dim_; }
  int n() const noexcept { return n_; }
  int basis_size() const noexcept { return static_cast<int>(basis_.size()); }

  /// Columns are the primitive translations t_k (third column is e_z in 2D).
  const Eigen::Matrix3d& periods() const noexcept { return periods_; }

  std::span<const Site> sites() const noexcept { return sites_; }
  std::span<const Edge> edges() const noexcept { return edges_; }
  std::span<const Cell> cells() const noexcept { return cells_; }
  std::span<const Simplex> triangulation() const noexcept { return simplices_; }
  int site_count() const noexcept { return static_cast<int>(sites_.size()); }

  /// Volume (area in 2D) of the half-open period cell U_n.
  double period_cell_volume() const noexcept { return cell_volume_; }

  /// n * sum_k wrap_k t_k.
  Point period_shift(const Offset& wrap) const { return double(n_) * (periods_ * wrap.cast<double>()); }
  Point reference_position(const LatticeRef& ref) const {
    return sites_[static_cast<std::size_t>(ref.site)].position + period_shift(ref.wrap);
  }

  /// Reduces unwrapped lattice coordinates (coord, basis) to site id + wrap.
  LatticeRef reduce(const Offset& coord, int basis) const;
  int site_id(const Offset& canonical_coord, int basis) const;

  /// All lattice points at distance 1 from `site`. In 2D the shell is ordered
  /// counterclockwise starting at direction 0 degrees.
  std::vector<LatticeRef> neighbor_shell(int site) const;

  CellCounts cell_counts() const;

  std::span<const int> edges_of_site(int site) const;
  std::span<const int> cells_of_site(int site) const;
  std::span<const int> simplices_of_site(int site) const;

 private:
  Lattice() = default;

  struct Incidence {
    std::vector<std::int32_t> offsets;
    std::vector<int> items;
    std::span<const int> of(int site) const;
  };

  LatticeKind kind_ = LatticeKind::Triangular2D;
  int dim_ = 2;
  int n_ = 1;
  Eigen::Matrix3d periods_ = Eigen::Matrix3d::Identity();
  std::vector<Point> basis_;
  // Per basis index: neighbour offsets as (cell delta, target basis).
  std::vector<std::vector<std::pair<Offset, int>>> shell_;
  std::vector<Site> sites_;
  std::vector<Edge> edges_;
  std::vector<Cell> cells_;
  std::vector<Simplex> simplices_;
  double cell_volume_ = 0.0;
  Incidence site_edges_;
  Incidence site_cells_;
  Incidence site_simplices_;
};

}  // namespace nearlattice
