#pragma once

#include <random>
#include <span>
#include <vector>

#include "nearlattice/configuration.hpp"

namespace nearlattice {

struct HamiltonianViolation {
  int index = 0;                 // point index (window: index into X, then Y)
  int annulus_count = 0;         // neighbours in (1, 1 + alpha)
  double nearest_distance = 0.0;
};

struct HamiltonianResult {
  bool zero = true;  // false means H = infinity
  std::vector<HamiltonianViolation> violations;
};

/// H(X) = 0 on a torus or in the plane: hard core > 1 and exactly six
/// annulus neighbours for every point.
HamiltonianResult hamiltonian_zero(const PointSet& ps);

/// Planar observation window: an axis-aligned rectangle or a disk.
struct Window {
  enum class Shape { Rect, Disk };
  Shape shape = Shape::Disk;
  Point center = Point::Zero();
  double radius = 1.0;               // disk
  Point lo = Point::Zero();          // rectangle corners
  Point hi = Point::Zero();

  static Window disk(const Point& center, double radius);
  static Window rect(const Point& lo, const Point& hi);

  bool contains(const Point& p) const;
  /// Euclidean distance from p to the window (0 inside).
  double distance_to(const Point& p) const;
  double area() const;
  Point sample(std::mt19937_64& rng) const;
};

/// H_{Lambda,Y}(X) in {0, infinity}. X must lie in the window and Y outside;
/// only Y within distance 2(1 + alpha) of the window is consulted.
/// Violation indices refer to X first, then Y (offset by |X|).
HamiltonianResult hamiltonian_window(const Window& window, std::span<const Point> x, std::span<const Point> y,
                                     double alpha);

}  // namespace nearlattice
