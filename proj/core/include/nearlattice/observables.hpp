#pragma once

#include <array>
#include <span>
#include <vector>

#include "nearlattice/configuration.hpp"

namespace nearlattice {

/// Jacobian deviations of the piecewise-affine extension, one entry per
/// triangulation simplex. Aggregates are weighted by reference volume.
struct DeviationStats {
  std::vector<double> dev_id;   // |J - Id|^2
  std::vector<double> dev_lid;  // |J - l Id|^2
  std::vector<double> dist_so;  // dist^2(J, SO(d))
  double l2_dev_id = 0.0;       // sum vol * |J - Id|^2
  double l2_dev_lid = 0.0;
  double l2_dist_so = 0.0;
  double mean_dev_id = 0.0;     // l2 / vol(U_n)
  double mean_dev_lid = 0.0;
  double mean_dist_so = 0.0;
  double max_dev_id = 0.0;
  double max_dev_lid = 0.0;
  double edge_dev_sum = 0.0;    // sum over cells and cell edges of (|e| - 1)^2
  SquareMatrix mean_jacobian;   // sum vol * J / vol(U_n)

  /// ||J - l Id||^2_{L2} / edge_dev_sum; 0 when both vanish.
  double rigidity_ratio() const;
};

DeviationStats deviation_statistics(const Configuration& c);

/// Per-simplex Jacobians of the piecewise-affine extension.
std::vector<SquareMatrix> simplex_jacobians(const Configuration& c);

/// sum vol * |J - A|^2 over the triangulation.
double l2_deviation_from(const Configuration& c, const SquareMatrix& a);

/// sum (signed image volume - reference volume) - vol(U_n)(l^d - 1).
double volume_sum_check(const Configuration& c);

struct DirectionStats {
  std::vector<double> angles;  // bond directions in [0, 2 pi)
  double psi6 = 0.0;
  double best_rotation = 0.0;          // phi* in [0, pi/3)
  double mean_abs_deviation = 0.0;     // radians, at phi*
  std::array<long, 6> class_histogram{};
};

/// Throws PRECONDITION_VIOLATED when a point lacks exactly six annulus neighbours.
DirectionStats neighbor_direction_stats(const PointSet& ps);
DirectionStats neighbor_direction_stats(const Configuration& c);
/// Same statistics for an explicit list of bond angles.
DirectionStats direction_stats_from_angles(std::vector<double> angles);

struct EntropyBound {
  double finite_n = 0.0;
  double n_free = 0.0;
  double density = 0.0;  // 2 / (l^2 sqrt 3)
};

/// Closed-form upper bound on the specific entropy from the ball sampler volume.
/// Throws RADIUS_TOO_LARGE / INVALID_ARGUMENT for an inadmissible radius.
EntropyBound entropy_upper_bound(int n, double l, double alpha, double r);

/// Central finite-difference volume derivative in one edge at the regular
/// octahedron (eps in (0, 1e-3]). Throws CONSTRUCTION_FAILURE if the
/// perturbed octahedron cannot be realised.
double octa_derivative_check(double eps);
/// Same for the regular tetrahedron, via the edge-length volume formula.
double tetra_derivative_check(double eps);

/// Volume of the convex octahedron with the given 12 edge lengths, ordered as
/// octahedron_edges(); vertex 0 at the origin on return.
double octahedron_volume_from_edges(const std::array<double, 12>& lengths, std::array<Point, 6>* vertices = nullptr);
/// Edges of the octahedron as vertex pairs (antipodal pairs (k, k+3) excluded).
const std::array<std::array<int, 2>, 12>& octahedron_edges() noexcept;

struct BatchMeans {
  double mean = 0.0;
  double standard_error = 0.0;
  int batches = 0;
};

/// Batch-means estimate (default 20 batches) of a chain's time average.
BatchMeans batch_means(std::span<const double> series, int batches = 20);

}  // namespace nearlattice
