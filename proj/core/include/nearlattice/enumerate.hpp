#pragma once

#include <utility>
#include <vector>

#include <Eigen/Core>

#include "nearlattice/configuration.hpp"

namespace nearlattice {

/// Triangular-lattice labeling of an unlabeled planar torus point set.
struct Labeling {
  int n = 0;
  std::vector<int> point_of_site;  // site id (a * n + b) -> point index
  std::vector<int> site_of_point;
  int anchor_point = -1;
  int anchor_direction_point = -1;  // neighbour mapped to lattice direction (1, 0)
  /// Lattice period n e_k maps to torus period sum_j period_map(j, k) P_j.
  Eigen::Matrix2i period_map = Eigen::Matrix2i::Identity();
};

/// Rebuilds the lattice labeling of a point set with H = 0 on a 2D torus.
/// Throws NOT_ENUMERABLE with a witness on failure.
Labeling enumerate_points(const PointSet& ps);

/// Lattice bonds of a labeling as sorted point-index pairs (first < second).
std::vector<std::pair<int, int>> labeled_edges(const Labeling& labeling);

/// Lattice bonds of a configuration mapped through `point_of_site`.
std::vector<std::pair<int, int>> configuration_edges(const Lattice& lattice, const std::vector<int>& point_of_site);

}  // namespace nearlattice
