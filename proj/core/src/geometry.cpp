#include "nearlattice/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "nearlattice/error.hpp"

namespace nearlattice {

namespace {

// Extended precision for the factorised radicand: the (-a + b + c + d)
// style factors cancel badly for flat tetrahedra in plain double.
using Wide = long double;

// `scale` is the magnitude of the value for unit-order relative rounding.
Wide checked_factor(Wide value, Wide scale, const char* what) {
  if (value < 0) {
    if (value < -static_cast<Wide>(kStrictGuard) * scale) {
      throw Error(ErrorCode::NonEmbeddable, std::string("edge lengths violate ") + what);
    }
    return 0;
  }
  return value;
}

}  // namespace

double tetra_volume_heron(double u, double v, double w, double U, double V, double W) {
  if (!(u > 0 && v > 0 && w > 0 && U > 0 && V > 0 && W > 0)) {
    throw Error(ErrorCode::InvalidArgument, "tetrahedron edge lengths must be positive");
  }
  const Wide uu = u, vv = v, ww = w, UU = U, VV = V, WW = W;
  const Wide top = std::max({uu, vv, ww, UU, VV, WW});
  const Wide s2 = top * top;

  const Wide X = checked_factor((ww - UU + vv) * (UU + vv + ww), s2, "a face triangle inequality");
  const Wide x = checked_factor((UU - vv + ww) * (vv - ww + UU), s2, "a face triangle inequality");
  const Wide Y = checked_factor((uu - VV + ww) * (VV + ww + uu), s2, "a face triangle inequality");
  const Wide y = checked_factor((VV - ww + uu) * (ww - uu + VV), s2, "a face triangle inequality");
  const Wide Z = checked_factor((vv - WW + uu) * (WW + uu + vv), s2, "a face triangle inequality");
  const Wide z = checked_factor((WW - uu + vv) * (uu - vv + WW), s2, "a face triangle inequality");

  const Wide a = std::sqrt(x * Y * Z);
  const Wide b = std::sqrt(y * Z * X);
  const Wide c = std::sqrt(z * X * Y);
  const Wide d = std::sqrt(x * y * z);

  const Wide radicand = (-a + b + c + d) * (a - b + c + d) * (a + b - c + d) * (a + b + c - d);
  const Wide clamped = checked_factor(radicand, s2 * s2 * s2 * s2 * s2 * s2, "tetrahedral embeddability");
  return static_cast<double>(std::sqrt(clamped) / (192 * uu * vv * ww));
}

double simplex_volume(std::span<const Point> vertices, int dim) {
  if (dim == 2) {
    if (vertices.size() != 3) throw Error(ErrorCode::InvalidArgument, "triangle needs 3 vertices");
    return signed_area(vertices[0], vertices[1], vertices[2]);
  }
  if (dim == 3) {
    if (vertices.size() != 4) throw Error(ErrorCode::InvalidArgument, "tetrahedron needs 4 vertices");
    return signed_tetra_volume(vertices[0], vertices[1], vertices[2], vertices[3]);
  }
  throw Error(ErrorCode::InvalidArgument, "dimension must be 2 or 3");
}

SquareMatrix edge_matrix(std::span<const Point> vertices, int dim) {
  SquareMatrix m(dim, dim);
  for (int k = 0; k < dim; ++k) {
    m.col(k) = (vertices[static_cast<std::size_t>(k + 1)] - vertices[0]).head(dim);
  }
  return m;
}

SquareMatrix cell_jacobian(std::span<const Point> reference, std::span<const Point> image, int dim) {
  if (std::abs(simplex_volume(reference, dim)) <= kStrictGuard) {
    throw Error(ErrorCode::DegenerateReference, "reference simplex has (near) zero volume");
  }
  if (dim == 2) {
    Eigen::Matrix2d ref, img;
    for (int k = 0; k < 2; ++k) {
      ref.col(k) = (reference[static_cast<std::size_t>(k + 1)] - reference[0]).head<2>();
      img.col(k) = (image[static_cast<std::size_t>(k + 1)] - image[0]).head<2>();
    }
    return img * ref.inverse();
  }
  Eigen::Matrix3d ref, img;
  for (int k = 0; k < 3; ++k) {
    ref.col(k) = reference[static_cast<std::size_t>(k + 1)] - reference[0];
    img.col(k) = image[static_cast<std::size_t>(k + 1)] - image[0];
  }
  return img * ref.inverse();
}

double dist_to_rotations_sq(const SquareMatrix& a) {
  const int d = static_cast<int>(a.rows());
  Eigen::JacobiSVD<SquareMatrix> svd(a);
  const auto& sigma = svd.singularValues();  // descending
  double sum = 0.0;
  for (int i = 0; i + 1 < d; ++i) sum += (sigma[i] - 1.0) * (sigma[i] - 1.0);
  const double smallest = sigma[d - 1];
  if (a.determinant() >= 0.0) {
    sum += (smallest - 1.0) * (smallest - 1.0);
  } else {
    sum += (smallest + 1.0) * (smallest + 1.0);
  }
  return sum;
}

double dist_to_rotations(const SquareMatrix& a) { return std::sqrt(dist_to_rotations_sq(a)); }

bool convex_image_check(std::span<const Point, 6> octa) {
  for (int mask = 0; mask < 8; ++mask) {
    const std::array<int, 3> face{(mask & 1) ? 3 : 0, (mask & 2) ? 4 : 1, (mask & 4) ? 5 : 2};
    const int flips = ((mask & 1) != 0) + ((mask & 2) != 0) + ((mask & 4) != 0);
    const Point& a = octa[static_cast<std::size_t>(face[0])];
    const Point normal = (octa[static_cast<std::size_t>(face[1])] - a).cross(octa[static_cast<std::size_t>(face[2])] - a);
    const double length = normal.norm();
    if (length <= kStrictGuard) {
      throw Error(ErrorCode::DegenerateFace, "octahedron face is collinear");
    }
    // Interior vertices sit on the negative side of an unflipped face.
    const double expected = (flips % 2 == 0) ? -1.0 : 1.0;
    for (int corner : face) {
      const Point& opposite = octa[static_cast<std::size_t>((corner + 3) % 6)];
      if (expected * normal.dot(opposite - a) / length <= kStrictGuard) return false;
    }
  }
  return true;
}

namespace {

bool separated_on(const Eigen::Vector3d& axis, std::span<const Point> a, std::span<const Point> b,
                  double guard) {
  const double scale = axis.norm();
  if (scale < 1e-14) return false;
  double min_a = axis.dot(a[0]), max_a = min_a;
  for (std::size_t i = 1; i < a.size(); ++i) {
    const double p = axis.dot(a[i]);
    min_a = std::min(min_a, p);
    max_a = std::max(max_a, p);
  }
  double min_b = axis.dot(b[0]), max_b = min_b;
  for (std::size_t i = 1; i < b.size(); ++i) {
    const double p = axis.dot(b[i]);
    min_b = std::min(min_b, p);
    max_b = std::max(max_b, p);
  }
  return std::min(max_a, max_b) - std::max(min_a, min_b) <= guard * scale;
}

constexpr std::array<std::array<int, 2>, 6> kTetraEdges{{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};
constexpr std::array<std::array<int, 3>, 4> kTetraFaces{{{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}}};

}  // namespace

bool simplices_overlap(std::span<const Point> a, std::span<const Point> b, int dim, double guard) {
  if (dim == 2) {
    for (auto tri : {a, b}) {
      for (int k = 0; k < 3; ++k) {
        const Point e = tri[static_cast<std::size_t>((k + 1) % 3)] - tri[static_cast<std::size_t>(k)];
        if (separated_on(Eigen::Vector3d(-e.y(), e.x(), 0.0), a, b, guard)) return false;
      }
    }
    return true;
  }
  for (auto tet : {a, b}) {
    for (const auto& f : kTetraFaces) {
      const Point n = (tet[f[1]] - tet[f[0]]).cross(tet[f[2]] - tet[f[0]]);
      if (separated_on(n, a, b, guard)) return false;
    }
  }
  for (const auto& ea : kTetraEdges) {
    const Point da = a[ea[1]] - a[ea[0]];
    for (const auto& eb : kTetraEdges) {
      const Point axis = da.cross(b[eb[1]] - b[eb[0]]);
      if (separated_on(axis, a, b, guard)) return false;
    }
  }
  return true;
}

double corner_angle(const Point& apex, const Point& p, const Point& q) {
  const Point u = p - apex;
  const Point v = q - apex;
  return std::atan2(u.cross(v).norm(), u.dot(v));
}

}  // namespace nearlattice
