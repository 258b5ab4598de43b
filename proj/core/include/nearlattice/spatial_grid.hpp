#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "nearlattice/types.hpp"

namespace nearlattice {

/// Distance model for point collections: a flat torus spanned by the columns
/// of `periods`, or the plain Euclidean space when `periodic` is false.
struct TorusMetric {
  int dim = 2;
  bool periodic = true;
  Eigen::Matrix3d periods = Eigen::Matrix3d::Identity();
  Eigen::Matrix3d inverse = Eigen::Matrix3d::Identity();

  static TorusMetric planar(int dim = 2);
  static TorusMetric torus(const Eigen::Matrix3d& periods, int dim);

  /// Shortest displacement b - a over all periodic images.
  Point displacement(const Point& a, const Point& b) const;
  double distance(const Point& a, const Point& b) const { return displacement(a, b).norm(); }
  /// Wraps `p` into the half-open period cell.
  Point wrap(const Point& p) const;
};

/// Neighbour hit: point index, integer period shift applied to the stored
/// point, and displacement (shifted point - query).
struct NeighborHit {
  int index = 0;
  Offset shift = Offset::Zero();
  Point displacement = Point::Zero();
};

/// Uniform bin grid over a torus (or bounding box). Queries visit every
/// periodic image within the radius exactly once, so tiny tori where a
/// ball wraps onto itself are handled.
class SpatialGrid {
 public:
  SpatialGrid(const TorusMetric& metric, double bin_size);

  void rebuild(std::span<const Point> points);

  template <class Fn>
  void for_each_within(const Point& query, double radius, Fn&& fn) const;

  std::vector<NeighborHit> within(const Point& query, double radius) const;

  const TorusMetric& metric() const noexcept { return metric_; }
  const Point& point(int index) const { return points_[static_cast<std::size_t>(index)]; }
  std::size_t size() const noexcept { return points_.size(); }

 private:
  int flat_index(const Eigen::Vector3i& bin) const {
    return (bin.x() * bins_.y() + bin.y()) * bins_.z() + bin.z();
  }

  TorusMetric metric_;
  double bin_size_;
  Eigen::Matrix3d inverse_ = Eigen::Matrix3d::Identity();
  Eigen::Vector3d row_norms_ = Eigen::Vector3d::Ones();
  Eigen::Vector3i bins_ = Eigen::Vector3i::Ones();
  Eigen::Vector3d origin_ = Eigen::Vector3d::Zero();  // planar bounding box corner
  std::vector<Point> points_;
  std::vector<Offset> base_shift_;  // floor of fractional coordinates
  std::vector<int> bin_start_;
  std::vector<int> bin_items_;
};

/// All points at distance strictly inside (r_lo, r_hi) from x, with a
/// symmetric 1e-12 guard band. Builds a grid of bin size r_hi.
std::vector<NeighborHit> annulus_neighbors(std::span<const Point> points, const TorusMetric& metric,
                                           const Point& x, double r_lo, double r_hi);

// ---------------------------------------------------------------------------

template <class Fn>
void SpatialGrid::for_each_within(const Point& query, double radius, Fn&& fn) const {
  const int dim = metric_.dim;
  Eigen::Vector3i lo = Eigen::Vector3i::Zero();
  Eigen::Vector3i hi = Eigen::Vector3i::Zero();
  if (metric_.periodic) {
    const Eigen::Vector3d f = inverse_ * query;
    for (int k = 0; k < dim; ++k) {
      const double reach = radius * row_norms_[k];
      lo[k] = static_cast<int>(std::floor((f[k] - reach) * bins_[k]));
      hi[k] = static_cast<int>(std::floor((f[k] + reach) * bins_[k]));
    }
  } else {
    for (int k = 0; k < dim; ++k) {
      lo[k] = std::max(0, static_cast<int>(std::floor((query[k] - radius - origin_[k]) / bin_size_)));
      hi[k] = std::min(bins_[k] - 1,
                       static_cast<int>(std::floor((query[k] + radius - origin_[k]) / bin_size_)));
    }
  }
  const double r2 = radius * radius;
  Eigen::Vector3i u = lo;
  for (u.x() = lo.x(); u.x() <= hi.x(); ++u.x()) {
    for (u.y() = lo.y(); u.y() <= hi.y(); ++u.y()) {
      for (u.z() = lo.z(); u.z() <= hi.z(); ++u.z()) {
        Eigen::Vector3i bin = u;
        Offset wraps = Offset::Zero();
        if (metric_.periodic) {
          for (int k = 0; k < dim; ++k) {
            const int m = bins_[k];
            int q = u[k] / m;
            if (u[k] % m < 0) --q;
            wraps[k] = q;
            bin[k] = u[k] - q * m;
          }
        }
        const int b = flat_index(bin);
        for (int at = bin_start_[b]; at < bin_start_[b + 1]; ++at) {
          const int j = bin_items_[at];
          const Offset shift = wraps - base_shift_[j];
          Point candidate = points_[j];
          if (metric_.periodic) candidate += metric_.periods * shift.cast<double>();
          const Point d = candidate - query;
          if (d.squaredNorm() <= r2) fn(NeighborHit{j, shift, d});
        }
      }
    }
  }
}

}  // namespace nearlattice
