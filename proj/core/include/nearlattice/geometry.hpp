#pragma once

#include <span>

#include "nearlattice/types.hpp"

namespace nearlattice {

/// Volume of a tetrahedron from its six edge lengths (Kahan's factorised
/// Heron form). u, v, w meet at one vertex; U, V, W are the opposite edges.
/// Radicands in [-1e-12, 0) are clamped to zero; anything more negative
/// throws NON_EMBEDDABLE.
double tetra_volume_heron(double u, double v, double w, double U, double V, double W);

/// Signed volume of a d-simplex, (1/d!) det[x_1 - x_0, ..., x_d - x_0].
/// `vertices` holds d + 1 points; dim is 2 or 3.
double simplex_volume(std::span<const Point> vertices, int dim);

inline double signed_area(const Point& a, const Point& b, const Point& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x()));
}

inline double signed_tetra_volume(const Point& a, const Point& b, const Point& c, const Point& d) {
  return (b - a).dot((c - a).cross(d - a)) / 6.0;
}

/// Matrix of edge vectors x_k - x_0 as columns.
SquareMatrix edge_matrix(std::span<const Point> vertices, int dim);

/// Gradient of the affine map taking `reference` onto `image`.
/// Throws DEGENERATE_REFERENCE when |reference volume| <= 1e-12.
SquareMatrix cell_jacobian(std::span<const Point> reference, std::span<const Point> image, int dim);

/// Squared Frobenius distance to SO(d) from the singular values; total on
/// matrices with det <= 0 via the signed-singular-value rule.
double dist_to_rotations_sq(const SquareMatrix& a);
double dist_to_rotations(const SquareMatrix& a);

/// Convexity of an octahedron image. Vertices follow the Cell ordering
/// (antipodal pairs (k, k + 3)) with reference orientation
/// det[P1 - P0, P2 - P0, P3 - P0] < 0. Throws DEGENERATE_FACE on a collinear face.
bool convex_image_check(std::span<const Point, 6> octa);

/// True when the interiors of two simplices of the same dimension intersect
/// (separating-axis test; overlaps up to `guard` count as touching).
bool simplices_overlap(std::span<const Point> a, std::span<const Point> b, int dim,
                       double guard = kStrictGuard);

/// Unsigned interior angle at `apex` of the triangle (apex, p, q).
double corner_angle(const Point& apex, const Point& p, const Point& q);

}  // namespace nearlattice
