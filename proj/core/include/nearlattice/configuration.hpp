#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "nearlattice/lattice.hpp"
#include "nearlattice/spatial_grid.hpp"
#include "nearlattice/types.hpp"

namespace nearlattice {

/// Unlabeled point collection on a torus or in the plane.
struct PointSet {
  std::vector<Point> points;
  TorusMetric metric = TorusMetric::planar(2);
  double alpha = 0.15;
};

/// n-periodic parametrized configuration. Site 0 is pinned at the origin;
/// the periodic extension omega(x + n t) = omega(x) + l n t is implicit.
class Configuration {
 public:
  Configuration(std::shared_ptr<const Lattice> lattice, std::vector<Point> positions, double l, double alpha);

  const Lattice& lattice() const noexcept { return *lattice_; }
  const std::shared_ptr<const Lattice>& lattice_ptr() const noexcept { return lattice_; }
  int dim() const noexcept { return lattice_->dim(); }
  double l() const noexcept { return l_; }
  double alpha() const noexcept { return alpha_; }

  std::span<const Point> positions() const noexcept { return positions_; }
  const Point& position(int site) const { return positions_[static_cast<std::size_t>(site)]; }
  /// Moves one site. Site 0 may not be moved.
  void set_position(int site, const Point& p);

  /// Columns are l * n * t_k: the periods of the image torus.
  const Eigen::Matrix3d& image_periods() const noexcept { return image_periods_; }
  Point image_shift(const Offset& wrap) const { return image_periods_ * wrap.cast<double>(); }
  Point image(const LatticeRef& ref) const { return position(ref.site) + image_shift(ref.wrap); }

  TorusMetric image_metric() const { return TorusMetric::torus(image_periods_, dim()); }
  /// Forgets the labels: positions wrapped into the image period cell.
  PointSet point_set() const;

 private:
  std::shared_ptr<const Lattice> lattice_;
  std::vector<Point> positions_;
  double l_;
  double alpha_;
  Eigen::Matrix3d image_periods_;
};

/// omega_l(x) = l x. Throws SCALE_OUT_OF_RANGE unless 1 < l < 1 + alpha.
Configuration scaled_lattice_config(std::shared_ptr<const Lattice> lattice, double l, double alpha);

/// Default neighbour-gap parameter per dimension (0.15 in 2D, 0.10 in 3D).
double default_alpha(int dim) noexcept;

struct ConditionResult {
  bool pass = true;
  std::vector<int> witnesses;  // edge, simplex, site or cell indices
};

struct OverlapWitness {
  int a = 0;
  int b = 0;
  Offset shift = Offset::Zero();  // period shift applied to simplex b
};

struct AdmissibilityReport {
  ConditionResult omega1;  // edge lengths
  ConditionResult omega2;  // injectivity; witnesses are sites failing the angle-sum pre-check
  ConditionResult omega3;  // orientation
  ConditionResult omega4;  // octahedron convexity (vacuous in 2D)
  std::vector<OverlapWitness> overlaps;

  bool overall() const noexcept { return omega1.pass && omega2.pass && omega3.pass && omega4.pass; }
  /// Name of the first failing condition, empty when admissible.
  std::string first_failure() const;
};

AdmissibilityReport check_admissibility(const Configuration& c);

/// True iff the image length lies strictly inside (1, 1 + alpha) with the guard band.
inline bool edge_length_ok(double length, double alpha) {
  return length > 1.0 + kStrictGuard && length < 1.0 + alpha - kStrictGuard;
}

}  // namespace nearlattice
