#include "nearlattice/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "nearlattice/error.hpp"

namespace nearlattice {

namespace {

constexpr int kRequiredNeighbors = 6;
constexpr std::size_t kBruteForceLimit = 48;

struct LocalCount {
  int annulus = 0;
  double nearest = std::numeric_limits<double>::infinity();

  void add(double d, double alpha) {
    nearest = std::min(nearest, d);
    if (d > 1.0 + kStrictGuard && d < 1.0 + alpha - kStrictGuard) ++annulus;
  }
  bool ok() const { return annulus == kRequiredNeighbors && nearest > 1.0 + kStrictGuard; }
};

}  // namespace

HamiltonianResult hamiltonian_zero(const PointSet& ps) {
  HamiltonianResult result;
  if (ps.points.empty()) return result;
  const double reach = 1.0 + ps.alpha;
  SpatialGrid grid(ps.metric, reach);
  grid.rebuild(ps.points);
  for (std::size_t i = 0; i < ps.points.size(); ++i) {
    LocalCount count;
    grid.for_each_within(ps.points[i], reach, [&](const NeighborHit& hit) {
      if (static_cast<std::size_t>(hit.index) == i && hit.shift.isZero()) return;
      count.add(hit.displacement.norm(), ps.alpha);
    });
    if (!count.ok()) {
      result.zero = false;
      result.violations.push_back(HamiltonianViolation{static_cast<int>(i), count.annulus, count.nearest});
    }
  }
  return result;
}

Window Window::disk(const Point& center, double radius) {
  if (!(radius > 0)) throw Error(ErrorCode::InvalidArgument, "disk radius must be positive");
  Window w;
  w.shape = Shape::Disk;
  w.center = center;
  w.radius = radius;
  return w;
}

Window Window::rect(const Point& lo, const Point& hi) {
  if (!(hi.x() > lo.x() && hi.y() > lo.y())) throw Error(ErrorCode::InvalidArgument, "rectangle corners out of order");
  Window w;
  w.shape = Shape::Rect;
  w.lo = lo;
  w.hi = hi;
  w.center = 0.5 * (lo + hi);
  return w;
}

bool Window::contains(const Point& p) const {
  if (shape == Shape::Disk) return (p - center).head<2>().norm() <= radius;
  return p.x() >= lo.x() && p.x() <= hi.x() && p.y() >= lo.y() && p.y() <= hi.y();
}

double Window::distance_to(const Point& p) const {
  if (shape == Shape::Disk) return std::max(0.0, (p - center).head<2>().norm() - radius);
  const double dx = std::max({lo.x() - p.x(), 0.0, p.x() - hi.x()});
  const double dy = std::max({lo.y() - p.y(), 0.0, p.y() - hi.y()});
  return std::hypot(dx, dy);
}

double Window::area() const {
  if (shape == Shape::Disk) return std::numbers::pi * radius * radius;
  return (hi.x() - lo.x()) * (hi.y() - lo.y());
}

Point Window::sample(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (shape == Shape::Rect) {
    return Point(lo.x() + (hi.x() - lo.x()) * unit(rng), lo.y() + (hi.y() - lo.y()) * unit(rng), 0.0);
  }
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  while (true) {
    const double x = sym(rng), y = sym(rng);
    if (x * x + y * y < 1.0) return Point(center.x() + radius * x, center.y() + radius * y, 0.0);
  }
}

HamiltonianResult hamiltonian_window(const Window& window, std::span<const Point> x, std::span<const Point> y,
                                     double alpha) {
  const double reach = 1.0 + alpha;
  // Points that may neighbour a checked point, tagged with their violation index.
  std::vector<Point> others;
  std::vector<int> tag;
  std::vector<char> checked;
  for (std::size_t i = 0; i < x.size(); ++i) {
    others.push_back(x[i]);
    tag.push_back(static_cast<int>(i));
    checked.push_back(1);
  }
  for (std::size_t j = 0; j < y.size(); ++j) {
    if (window.contains(y[j])) continue;
    const double d = window.distance_to(y[j]);
    if (d >= 2 * reach) continue;
    others.push_back(y[j]);
    tag.push_back(static_cast<int>(x.size() + j));
    checked.push_back(d < reach ? 1 : 0);
  }

  HamiltonianResult result;
  auto record = [&](std::size_t i, const LocalCount& count) {
    if (!count.ok()) {
      result.zero = false;
      result.violations.push_back(HamiltonianViolation{tag[i], count.annulus, count.nearest});
    }
  };

  if (others.size() <= kBruteForceLimit) {
    for (std::size_t i = 0; i < others.size(); ++i) {
      if (!checked[i]) continue;
      LocalCount count;
      for (std::size_t j = 0; j < others.size(); ++j) {
        if (j != i) count.add((others[j] - others[i]).norm(), alpha);
      }
      record(i, count);
    }
    return result;
  }

  SpatialGrid grid(TorusMetric::planar(2), reach);
  grid.rebuild(others);
  for (std::size_t i = 0; i < others.size(); ++i) {
    if (!checked[i]) continue;
    LocalCount count;
    grid.for_each_within(others[i], reach, [&](const NeighborHit& hit) {
      if (static_cast<std::size_t>(hit.index) != i) count.add(hit.displacement.norm(), alpha);
    });
    record(i, count);
  }
  return result;
}

}  // namespace nearlattice
