#include "nearlattice/configuration.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "nearlattice/error.hpp"
#include "nearlattice/geometry.hpp"

namespace nearlattice {

namespace {

constexpr double kAngleSumTol = 1e-8;
constexpr std::size_t kMaxOverlapWitnesses = 64;

bool lex_positive(const Offset& w) {
  for (int k = 0; k < 3; ++k) {
    if (w[k] != 0) return w[k] > 0;
  }
  return false;
}

}  // namespace

Configuration::Configuration(std::shared_ptr<const Lattice> lattice, std::vector<Point> positions, double l,
                             double alpha)
    : lattice_(std::move(lattice)), positions_(std::move(positions)), l_(l), alpha_(alpha) {
  if (!lattice_) throw Error(ErrorCode::InvalidArgument, "configuration needs a lattice");
  if (static_cast<int>(positions_.size()) != lattice_->site_count()) {
    throw Error(ErrorCode::InvalidArgument, "position count does not match the lattice");
  }
  if (!(alpha_ > 0.0 && alpha_ <= 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1]");
  if (!(l_ > 1.0 && l_ < 1.0 + alpha_)) {
    throw Error(ErrorCode::ScaleOutOfRange, "l must lie in the open interval (1, 1 + alpha)");
  }
  if (!positions_[0].isZero(0.0)) throw Error(ErrorCode::InvalidArgument, "site 0 must sit at the origin");
  for (const auto& p : positions_) {
    if (!p.allFinite()) throw Error(ErrorCode::InvalidArgument, "positions must be finite");
    if (lattice_->dim() == 2 && p.z() != 0.0) throw Error(ErrorCode::InvalidArgument, "planar positions need z = 0");
  }
  image_periods_ = l_ * double(lattice_->n()) * lattice_->periods();
  if (lattice_->dim() == 2) image_periods_.col(2) = Eigen::Vector3d::UnitZ();
}

void Configuration::set_position(int site, const Point& p) {
  if (site <= 0 || site >= lattice_->site_count()) {
    throw Error(ErrorCode::InvalidArgument, "site out of range or pinned");
  }
  positions_[static_cast<std::size_t>(site)] = p;
}

PointSet Configuration::point_set() const {
  PointSet ps;
  ps.metric = image_metric();
  ps.alpha = alpha_;
  ps.points.reserve(positions_.size());
  for (const auto& p : positions_) ps.points.push_back(ps.metric.wrap(p));
  return ps;
}

Configuration scaled_lattice_config(std::shared_ptr<const Lattice> lattice, double l, double alpha) {
  if (!lattice) throw Error(ErrorCode::InvalidArgument, "configuration needs a lattice");
  if (!(l > 1.0 && l < 1.0 + alpha)) {
    throw Error(ErrorCode::ScaleOutOfRange, "l must lie in the open interval (1, 1 + alpha)");
  }
  std::vector<Point> positions;
  positions.reserve(lattice->sites().size());
  for (const auto& s : lattice->sites()) positions.push_back(l * s.position);
  return Configuration(std::move(lattice), std::move(positions), l, alpha);
}

double default_alpha(int dim) noexcept { return dim == 2 ? 0.15 : 0.10; }

std::string AdmissibilityReport::first_failure() const {
  if (!omega1.pass) return "omega1";
  if (!omega2.pass) return "omega2";
  if (!omega3.pass) return "omega3";
  if (!omega4.pass) return "omega4";
  return {};
}

AdmissibilityReport check_admissibility(const Configuration& c) {
  const Lattice& lat = c.lattice();
  const int dim = lat.dim();
  AdmissibilityReport report;

  const auto edges = lat.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const Edge& edge = edges[e];
    const double length = (c.image(LatticeRef{edge.j, edge.wrap}) - c.position(edge.i)).norm();
    if (!edge_length_ok(length, c.alpha())) {
      report.omega1.pass = false;
      report.omega1.witnesses.push_back(static_cast<int>(e));
    }
  }

  const auto simplices = lat.triangulation();
  std::vector<std::array<Point, 4>> images(simplices.size());
  for (std::size_t s = 0; s < simplices.size(); ++s) {
    const Simplex& sx = simplices[s];
    for (int k = 0; k < sx.vertex_count; ++k) images[s][static_cast<std::size_t>(k)] = c.image(sx.vertices[static_cast<std::size_t>(k)]);
    const double vol = simplex_volume(std::span<const Point>(images[s].data(), static_cast<std::size_t>(sx.vertex_count)), dim);
    if (!(vol > kStrictGuard)) {
      report.omega3.pass = false;
      report.omega3.witnesses.push_back(static_cast<int>(s));
    }
  }

  if (dim == 3) {
    const auto cells = lat.cells();
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (cells[k].kind != CellKind::Octa) continue;
      std::array<Point, 6> octa;
      for (int v = 0; v < 6; ++v) octa[static_cast<std::size_t>(v)] = c.image(cells[k].vertices[static_cast<std::size_t>(v)]);
      bool convex = false;
      try {
        convex = convex_image_check(octa);
      } catch (const Error&) {
        convex = false;
      }
      if (!convex) {
        report.omega4.pass = false;
        report.omega4.witnesses.push_back(static_cast<int>(k));
      }
    }
  }

  if (!report.omega3.pass) {
    report.omega2.pass = false;
    return report;
  }

  if (dim == 2) {
    std::vector<double> angle_sum(static_cast<std::size_t>(lat.site_count()), 0.0);
    for (std::size_t s = 0; s < simplices.size(); ++s) {
      const auto& q = images[s];
      for (int k = 0; k < 3; ++k) {
        angle_sum[static_cast<std::size_t>(simplices[s].vertices[static_cast<std::size_t>(k)].site)] +=
            corner_angle(q[static_cast<std::size_t>(k)], q[static_cast<std::size_t>((k + 1) % 3)],
                         q[static_cast<std::size_t>((k + 2) % 3)]);
      }
    }
    for (std::size_t i = 0; i < angle_sum.size(); ++i) {
      if (std::abs(angle_sum[i] - 2 * std::numbers::pi) > kAngleSumTol) {
        report.omega2.pass = false;
        report.omega2.witnesses.push_back(static_cast<int>(i));
      }
    }
    if (!report.omega2.pass) return report;
  }

  // Pairwise image overlap of simplices that do not share a facet.
  const std::size_t count = simplices.size();
  const auto corners = static_cast<std::size_t>(dim + 1);
  std::vector<Point> centroid(count);
  std::vector<double> radius(count, 0.0);
  double max_radius = 0.0;
  for (std::size_t s = 0; s < count; ++s) {
    Point sum = Point::Zero();
    for (std::size_t k = 0; k < corners; ++k) sum += images[s][k];
    centroid[s] = sum / double(corners);
    for (std::size_t k = 0; k < corners; ++k) radius[s] = std::max(radius[s], (images[s][k] - centroid[s]).norm());
    max_radius = std::max(max_radius, radius[s]);
  }
  const Eigen::Matrix3d& P = c.image_periods();
  SpatialGrid grid(c.image_metric(), 2 * max_radius + kStrictGuard);
  grid.rebuild(centroid);

  for (std::size_t s = 0; s < count && report.overlaps.size() < kMaxOverlapWitnesses; ++s) {
    const Simplex& a = simplices[s];
    grid.for_each_within(centroid[s], radius[s] + max_radius + kStrictGuard, [&](const NeighborHit& hit) {
      const auto t = static_cast<std::size_t>(hit.index);
      if (t < s || (t == s && !lex_positive(hit.shift))) return;
      if (hit.displacement.norm() > radius[s] + radius[t] + kStrictGuard) return;
      const Simplex& b = simplices[t];
      int shared = 0;
      for (const auto& ra : a.corners()) {
        for (const auto& rb : b.corners()) {
          if (ra.site == rb.site && ra.wrap == rb.wrap + hit.shift) ++shared;
        }
      }
      if (shared >= dim) return;
      std::array<Point, 4> moved = images[t];
      const Point offset = P * hit.shift.cast<double>();
      for (std::size_t k = 0; k < corners; ++k) moved[k] += offset;
      if (simplices_overlap(std::span<const Point>(images[s].data(), corners),
                            std::span<const Point>(moved.data(), corners), dim)) {
        report.omega2.pass = false;
        if (report.overlaps.size() < kMaxOverlapWitnesses) {
          report.overlaps.push_back(OverlapWitness{static_cast<int>(s), static_cast<int>(t), hit.shift});
        }
      }
    });
  }
  return report;
}

}  // namespace nearlattice
