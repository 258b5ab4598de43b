#include "nearlattice/enumerate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <numbers>
#include <string>
#include <tuple>

#include <Eigen/LU>

#include "nearlattice/error.hpp"

namespace nearlattice {

namespace {

constexpr double kMatchTol = 1e-9;
constexpr double kIntegerTol = 1e-6;

const std::array<Eigen::Vector2i, 6> kDirections{
    Eigen::Vector2i(1, 0), Eigen::Vector2i(0, 1), Eigen::Vector2i(-1, 1),
    Eigen::Vector2i(-1, 0), Eigen::Vector2i(0, -1), Eigen::Vector2i(1, -1)};

struct Neighbor {
  int index = 0;
  Point displacement = Point::Zero();
  double angle = 0.0;
};

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorCode::NotEnumerable, what); }

int mod(int a, int n) {
  const int r = a % n;
  return r < 0 ? r + n : r;
}

}  // namespace

Labeling enumerate_points(const PointSet& ps) {
  if (!ps.metric.periodic || ps.metric.dim != 2) fail("enumeration needs a planar torus");
  const int count = static_cast<int>(ps.points.size());
  const int n = static_cast<int>(std::lround(std::sqrt(double(count))));
  if (n < 1 || n * n != count) fail("point count " + std::to_string(count) + " is not a square");

  const double alpha = ps.alpha;
  SpatialGrid grid(ps.metric, 1.0 + alpha);
  grid.rebuild(ps.points);
  std::vector<std::array<Neighbor, 6>> shell(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    std::vector<Neighbor> found;
    bool hard_core = true;
    grid.for_each_within(ps.points[static_cast<std::size_t>(i)], 1.0 + alpha, [&](const NeighborHit& hit) {
      if (hit.index == i && hit.shift.isZero()) return;
      const double d = hit.displacement.norm();
      if (d <= 1.0 + kStrictGuard) hard_core = false;
      if (d > 1.0 + kStrictGuard && d < 1.0 + alpha - kStrictGuard) {
        double angle = std::atan2(hit.displacement.y(), hit.displacement.x());
        if (angle < 0) angle += 2 * std::numbers::pi;
        found.push_back(Neighbor{hit.index, hit.displacement, angle});
      }
    });
    if (!hard_core) fail("point " + std::to_string(i) + " violates the hard core");
    if (found.size() != 6) {
      fail("point " + std::to_string(i) + " has " + std::to_string(found.size()) + " annulus neighbours");
    }
    std::sort(found.begin(), found.end(), [](const Neighbor& a, const Neighbor& b) { return a.angle < b.angle; });
    std::copy(found.begin(), found.end(), shell[static_cast<std::size_t>(i)].begin());
  }

  Labeling out;
  out.n = n;
  {
    int best = 0;
    double best_d = ps.metric.distance(Point::Zero(), ps.points[0]);
    for (int i = 1; i < count; ++i) {
      const Point& p = ps.points[static_cast<std::size_t>(i)];
      const Point& q = ps.points[static_cast<std::size_t>(best)];
      const double d = ps.metric.distance(Point::Zero(), p);
      if (d < best_d - kStrictGuard ||
          (std::abs(d - best_d) <= kStrictGuard && std::tie(p.x(), p.y()) < std::tie(q.x(), q.y()))) {
        best = i;
        best_d = d;
      }
    }
    out.anchor_point = best;
    out.anchor_direction_point = shell[static_cast<std::size_t>(best)][0].index;
  }

  // Breadth-first labeling; rotation[i] maps shell slot m to direction (m + rotation[i]) mod 6.
  std::vector<char> labeled(static_cast<std::size_t>(count), 0);
  std::vector<int> rotation(static_cast<std::size_t>(count), 0);
  std::vector<Eigen::Vector2i> coord(static_cast<std::size_t>(count), Eigen::Vector2i::Zero());
  std::vector<Point> unwrapped(static_cast<std::size_t>(count), Point::Zero());
  std::deque<int> queue{out.anchor_point};
  labeled[static_cast<std::size_t>(out.anchor_point)] = 1;
  unwrapped[static_cast<std::size_t>(out.anchor_point)] = ps.points[static_cast<std::size_t>(out.anchor_point)];
  while (!queue.empty()) {
    const int p = queue.front();
    queue.pop_front();
    const auto up = static_cast<std::size_t>(p);
    for (int m = 0; m < 6; ++m) {
      const Neighbor& nb = shell[up][static_cast<std::size_t>(m)];
      const auto uq = static_cast<std::size_t>(nb.index);
      if (labeled[uq]) continue;
      const int k = (m + rotation[up]) % 6;
      int back = -1;
      for (int j = 0; j < 6; ++j) {
        const Neighbor& cand = shell[uq][static_cast<std::size_t>(j)];
        if (cand.index == p && (cand.displacement + nb.displacement).norm() < kMatchTol) back = j;
      }
      if (back < 0) fail("neighbour relation between points " + std::to_string(p) + " and " + std::to_string(nb.index) + " is not symmetric");
      rotation[uq] = mod(k + 3 - back, 6);
      coord[uq] = coord[up] + kDirections[static_cast<std::size_t>(k)];
      unwrapped[uq] = unwrapped[up] + nb.displacement;
      labeled[uq] = 1;
      queue.push_back(nb.index);
    }
  }
  for (int i = 0; i < count; ++i) {
    if (!labeled[static_cast<std::size_t>(i)]) fail("point " + std::to_string(i) + " is not connected to the anchor");
  }

  out.point_of_site.assign(static_cast<std::size_t>(count), -1);
  out.site_of_point.assign(static_cast<std::size_t>(count), -1);
  for (int i = 0; i < count; ++i) {
    const auto& c = coord[static_cast<std::size_t>(i)];
    const int site = mod(c.x(), n) * n + mod(c.y(), n);
    if (out.point_of_site[static_cast<std::size_t>(site)] >= 0) {
      fail("points " + std::to_string(out.point_of_site[static_cast<std::size_t>(site)]) + " and " +
           std::to_string(i) + " receive the same site");
    }
    out.point_of_site[static_cast<std::size_t>(site)] = i;
    out.site_of_point[static_cast<std::size_t>(i)] = site;
  }

  // Every bond, tree or not: lattice step and image step must close up to a period pair.
  const Eigen::Matrix2d torus = ps.metric.periods.topLeftCorner<2, 2>();
  const Eigen::Matrix2d torus_inv = torus.inverse();
  std::vector<std::pair<Eigen::Vector2i, Eigen::Vector2i>> closures;  // (lattice periods v, torus periods w)
  for (int p = 0; p < count; ++p) {
    const auto up = static_cast<std::size_t>(p);
    for (int m = 0; m < 6; ++m) {
      const Neighbor& nb = shell[up][static_cast<std::size_t>(m)];
      const auto uq = static_cast<std::size_t>(nb.index);
      const int k = (m + rotation[up]) % 6;
      const Eigen::Vector2i dl = coord[up] + kDirections[static_cast<std::size_t>(k)] - coord[uq];
      const std::string witness = "bond " + std::to_string(p) + " -> " + std::to_string(nb.index);
      if (mod(dl.x(), n) != 0 || mod(dl.y(), n) != 0) fail(witness + " does not match a lattice bond");
      const Eigen::Vector2d wf = torus_inv * (unwrapped[up] + nb.displacement - unwrapped[uq]).head<2>();
      const Eigen::Vector2i w(static_cast<int>(std::lround(wf.x())), static_cast<int>(std::lround(wf.y())));
      if ((wf - w.cast<double>()).norm() > kIntegerTol) fail(witness + " does not close on a torus period");
      const Eigen::Vector2i v = dl / n;
      if (!v.isZero() || !w.isZero()) closures.emplace_back(v, w);
    }
  }

  // Period map: w = M v, integer and unimodular.
  if (!closures.empty()) {
    int first = -1, second = -1;
    for (std::size_t a = 0; a < closures.size() && second < 0; ++a) {
      for (std::size_t b = a + 1; b < closures.size(); ++b) {
        const auto& va = closures[a].first;
        const auto& vb = closures[b].first;
        if (va.x() * vb.y() - va.y() * vb.x() != 0) {
          first = static_cast<int>(a);
          second = static_cast<int>(b);
          break;
        }
      }
    }
    if (second < 0) fail("bond closures do not span both periods");
    Eigen::Matrix2d V, W;
    V.col(0) = closures[static_cast<std::size_t>(first)].first.cast<double>();
    V.col(1) = closures[static_cast<std::size_t>(second)].first.cast<double>();
    W.col(0) = closures[static_cast<std::size_t>(first)].second.cast<double>();
    W.col(1) = closures[static_cast<std::size_t>(second)].second.cast<double>();
    const Eigen::Matrix2d M = W * V.inverse();
    Eigen::Matrix2i Mi;
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) {
        Mi(r, c) = static_cast<int>(std::lround(M(r, c)));
        if (std::abs(M(r, c) - Mi(r, c)) > kIntegerTol) fail("period map is not integral");
      }
    }
    if (std::abs(Mi(0, 0) * Mi(1, 1) - Mi(0, 1) * Mi(1, 0)) != 1) fail("period map is not unimodular");
    for (const auto& [v, w] : closures) {
      if (Mi * v != w) fail("bond closures disagree with the period map");
    }
    out.period_map = Mi;
  } else if (n > 1) {
    fail("no bond wraps around the torus");
  }
  return out;
}

std::vector<std::pair<int, int>> labeled_edges(const Labeling& labeling) {
  const int n = labeling.n;
  std::vector<std::pair<int, int>> out;
  out.reserve(static_cast<std::size_t>(3 * n * n));
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const int p = labeling.point_of_site[static_cast<std::size_t>(a * n + b)];
      for (int k = 0; k < 3; ++k) {
        const auto& d = kDirections[static_cast<std::size_t>(k)];
        const int q = labeling.point_of_site[static_cast<std::size_t>(mod(a + d.x(), n) * n + mod(b + d.y(), n))];
        out.emplace_back(std::min(p, q), std::max(p, q));
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::pair<int, int>> configuration_edges(const Lattice& lattice, const std::vector<int>& point_of_site) {
  std::vector<std::pair<int, int>> out;
  out.reserve(lattice.edges().size());
  for (const auto& e : lattice.edges()) {
    const int p = point_of_site[static_cast<std::size_t>(e.i)];
    const int q = point_of_site[static_cast<std::size_t>(e.j)];
    out.emplace_back(std::min(p, q), std::max(p, q));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace nearlattice
