#include "nearlattice/spatial_grid.hpp"

#include <Eigen/LU>

#include "nearlattice/error.hpp"

namespace nearlattice {

namespace {

constexpr int kMaxBinsPerAxis = 1024;
constexpr long kMaxBinsTotal = 1L << 22;

}  // namespace

TorusMetric TorusMetric::planar(int dim) {
  TorusMetric m;
  m.dim = dim;
  m.periodic = false;
  return m;
}

TorusMetric TorusMetric::torus(const Eigen::Matrix3d& periods, int dim) {
  if (dim != 2 && dim != 3) throw Error(ErrorCode::InvalidArgument, "dimension must be 2 or 3");
  TorusMetric m;
  m.dim = dim;
  m.periodic = true;
  m.periods = periods;
  if (dim == 2) {
    m.periods.col(2) = Eigen::Vector3d::UnitZ();
    m.periods.row(2).head<2>().setZero();
  }
  if (std::abs(m.periods.determinant()) < 1e-12) {
    throw Error(ErrorCode::InvalidArgument, "torus periods are degenerate");
  }
  m.inverse = m.periods.inverse();
  return m;
}

Point TorusMetric::displacement(const Point& a, const Point& b) const {
  Point d = b - a;
  if (!periodic) return d;
  Eigen::Vector3d f = inverse * d;
  for (int k = 0; k < dim; ++k) f[k] -= std::round(f[k]);
  const Point base = periods * f;
  // Rounded fractional coordinates are not always the shortest image on skewed cells.
  Point best = base;
  double best_sq = base.squaredNorm();
  const int zr = dim == 3 ? 1 : 0;
  for (int i = -1; i <= 1; ++i) {
    for (int j = -1; j <= 1; ++j) {
      for (int k = -zr; k <= zr; ++k) {
        if (i == 0 && j == 0 && k == 0) continue;
        const Point cand = base + periods * Eigen::Vector3d(i, j, k);
        const double sq = cand.squaredNorm();
        if (sq < best_sq) {
          best_sq = sq;
          best = cand;
        }
      }
    }
  }
  return best;
}

Point TorusMetric::wrap(const Point& p) const {
  if (!periodic) return p;
  Eigen::Vector3d f = inverse * p;
  for (int k = 0; k < dim; ++k) {
    f[k] -= std::floor(f[k]);
    if (f[k] >= 1.0) f[k] = 0.0;
  }
  if (dim == 2) f[2] = p.z();
  return periods * f;
}

SpatialGrid::SpatialGrid(const TorusMetric& metric, double bin_size) : metric_(metric), bin_size_(bin_size) {
  if (!(bin_size > 0)) throw Error(ErrorCode::InvalidArgument, "bin size must be positive");
  if (metric_.periodic) {
    inverse_ = metric_.inverse;
    long total = 1;
    for (int k = 0; k < metric_.dim; ++k) {
      row_norms_[k] = inverse_.row(k).norm();
      const double width = 1.0 / row_norms_[k];
      int m = static_cast<int>(std::floor(width / bin_size));
      m = std::clamp(m, 1, kMaxBinsPerAxis);
      while (total * m > kMaxBinsTotal && m > 1) m /= 2;
      bins_[k] = m;
      total *= m;
    }
  }
}

void SpatialGrid::rebuild(std::span<const Point> points) {
  const int dim = metric_.dim;
  points_.assign(points.begin(), points.end());
  base_shift_.assign(points_.size(), Offset::Zero());
  std::vector<int> bin_of(points_.size(), 0);

  if (metric_.periodic) {
    for (std::size_t j = 0; j < points_.size(); ++j) {
      const Eigen::Vector3d f = inverse_ * points_[j];
      Eigen::Vector3i bin = Eigen::Vector3i::Zero();
      for (int k = 0; k < dim; ++k) {
        const double fl = std::floor(f[k]);
        base_shift_[j][k] = static_cast<int>(fl);
        bin[k] = std::min(bins_[k] - 1, static_cast<int>(std::floor((f[k] - fl) * bins_[k])));
      }
      bin_of[j] = flat_index(bin);
    }
  } else {
    if (!points_.empty()) {
      Point lo = points_[0], hi = points_[0];
      for (const auto& p : points_) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
      }
      origin_ = lo;
      double extent = 0.0;
      for (int k = 0; k < dim; ++k) extent = std::max(extent, hi[k] - lo[k]);
      bin_size_ = std::max(bin_size_, extent / kMaxBinsPerAxis);
      for (int k = 0; k < dim; ++k) {
        bins_[k] = static_cast<int>(std::floor((hi[k] - lo[k]) / bin_size_)) + 1;
      }
    }
    for (std::size_t j = 0; j < points_.size(); ++j) {
      Eigen::Vector3i bin = Eigen::Vector3i::Zero();
      for (int k = 0; k < dim; ++k) {
        bin[k] = std::min(bins_[k] - 1, static_cast<int>(std::floor((points_[j][k] - origin_[k]) / bin_size_)));
      }
      bin_of[j] = flat_index(bin);
    }
  }

  const int total = bins_.x() * bins_.y() * bins_.z();
  bin_start_.assign(static_cast<std::size_t>(total) + 1, 0);
  for (int b : bin_of) ++bin_start_[static_cast<std::size_t>(b) + 1];
  for (int b = 0; b < total; ++b) bin_start_[b + 1] += bin_start_[b];
  bin_items_.assign(points_.size(), 0);
  std::vector<int> cursor(bin_start_.begin(), bin_start_.end() - 1);
  for (std::size_t j = 0; j < points_.size(); ++j) {
    bin_items_[static_cast<std::size_t>(cursor[static_cast<std::size_t>(bin_of[j])]++)] = static_cast<int>(j);
  }
}

std::vector<NeighborHit> SpatialGrid::within(const Point& query, double radius) const {
  std::vector<NeighborHit> hits;
  for_each_within(query, radius, [&](const NeighborHit& h) { hits.push_back(h); });
  return hits;
}

std::vector<NeighborHit> annulus_neighbors(std::span<const Point> points, const TorusMetric& metric,
                                           const Point& x, double r_lo, double r_hi) {
  if (!(r_lo < r_hi)) throw Error(ErrorCode::InvalidArgument, "annulus needs r_lo < r_hi");
  SpatialGrid grid(metric, r_hi);
  grid.rebuild(points);
  std::vector<NeighborHit> out;
  grid.for_each_within(x, r_hi, [&](const NeighborHit& h) {
    const double d = h.displacement.norm();
    if (d > r_lo + kStrictGuard && d < r_hi - kStrictGuard) out.push_back(h);
  });
  return out;
}

}  // namespace nearlattice
