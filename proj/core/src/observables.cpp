#include "nearlattice/observables.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "nearlattice/error.hpp"
#include "nearlattice/geometry.hpp"

namespace nearlattice {

namespace {

constexpr double kSixth = std::numbers::pi / 3.0;

constexpr std::array<std::array<int, 2>, 3> kTriangleEdges{{{0, 1}, {1, 2}, {0, 2}}};
constexpr std::array<std::array<int, 2>, 6> kTetraEdges{{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};
constexpr std::array<std::array<int, 2>, 12> kOctaEdges{{{0, 1}, {0, 2}, {0, 4}, {0, 5}, {1, 2}, {1, 3},
                                                          {1, 5}, {2, 3}, {2, 4}, {3, 4}, {3, 5}, {4, 5}}};

SquareMatrix simplex_jacobian(const Configuration& c, const Simplex& sx) {
  const Lattice& lat = c.lattice();
  std::array<Point, 4> ref, img;
  for (std::size_t k = 0; k < static_cast<std::size_t>(sx.vertex_count); ++k) {
    ref[k] = lat.reference_position(sx.vertices[k]);
    img[k] = c.image(sx.vertices[k]);
  }
  const auto count = static_cast<std::size_t>(sx.vertex_count);
  return cell_jacobian(std::span<const Point>(ref.data(), count), std::span<const Point>(img.data(), count), lat.dim());
}

}  // namespace

double DeviationStats::rigidity_ratio() const {
  if (edge_dev_sum == 0.0) return l2_dev_lid == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return l2_dev_lid / edge_dev_sum;
}

std::vector<SquareMatrix> simplex_jacobians(const Configuration& c) {
  std::vector<SquareMatrix> out;
  out.reserve(c.lattice().triangulation().size());
  for (const auto& sx : c.lattice().triangulation()) out.push_back(simplex_jacobian(c, sx));
  return out;
}

DeviationStats deviation_statistics(const Configuration& c) {
  const Lattice& lat = c.lattice();
  const int d = lat.dim();
  const SquareMatrix id = SquareMatrix::Identity(d, d);
  const double volume = lat.period_cell_volume();

  DeviationStats st;
  st.mean_jacobian = SquareMatrix::Zero(d, d);
  const auto simplices = lat.triangulation();
  st.dev_id.reserve(simplices.size());
  st.dev_lid.reserve(simplices.size());
  st.dist_so.reserve(simplices.size());
  for (const auto& sx : simplices) {
    const SquareMatrix j = simplex_jacobian(c, sx);
    const double w = sx.reference_volume;
    const double a = (j - id).squaredNorm();
    const double b = (j - c.l() * id).squaredNorm();
    const double r = dist_to_rotations_sq(j);
    st.dev_id.push_back(a);
    st.dev_lid.push_back(b);
    st.dist_so.push_back(r);
    st.l2_dev_id += w * a;
    st.l2_dev_lid += w * b;
    st.l2_dist_so += w * r;
    st.max_dev_id = std::max(st.max_dev_id, a);
    st.max_dev_lid = std::max(st.max_dev_lid, b);
    st.mean_jacobian += w * j;
  }
  st.mean_dev_id = st.l2_dev_id / volume;
  st.mean_dev_lid = st.l2_dev_lid / volume;
  st.mean_dist_so = st.l2_dist_so / volume;
  st.mean_jacobian /= volume;

  for (const auto& cell : lat.cells()) {
    auto add = [&](const auto& edges) {
      for (const auto& e : edges) {
        const double len = (c.image(cell.vertices[static_cast<std::size_t>(e[1])]) -
                            c.image(cell.vertices[static_cast<std::size_t>(e[0])])).norm();
        st.edge_dev_sum += (len - 1.0) * (len - 1.0);
      }
    };
    switch (cell.kind) {
      case CellKind::Triangle: add(kTriangleEdges); break;
      case CellKind::Tetra: add(kTetraEdges); break;
      case CellKind::Octa: add(kOctaEdges); break;
    }
  }
  return st;
}

double l2_deviation_from(const Configuration& c, const SquareMatrix& a) {
  double sum = 0.0;
  for (const auto& sx : c.lattice().triangulation()) {
    sum += sx.reference_volume * (simplex_jacobian(c, sx) - a).squaredNorm();
  }
  return sum;
}

double volume_sum_check(const Configuration& c) {
  const Lattice& lat = c.lattice();
  const int d = lat.dim();
  double sum = 0.0;
  for (const auto& sx : lat.triangulation()) {
    std::array<Point, 4> img;
    for (std::size_t k = 0; k < static_cast<std::size_t>(sx.vertex_count); ++k) img[k] = c.image(sx.vertices[k]);
    sum += simplex_volume(std::span<const Point>(img.data(), static_cast<std::size_t>(sx.vertex_count)), d) -
           sx.reference_volume;
  }
  return sum - lat.period_cell_volume() * (std::pow(c.l(), d) - 1.0);
}

DirectionStats direction_stats_from_angles(std::vector<double> angles) {
  DirectionStats st;
  const std::size_t count = angles.size();
  for (auto& a : angles) {
    a = std::fmod(a, 2 * std::numbers::pi);
    if (a < 0) a += 2 * std::numbers::pi;
  }
  st.angles = std::move(angles);
  if (count == 0) return st;

  std::complex<double> sum = 0.0;
  for (double a : st.angles) sum += std::polar(1.0, 6.0 * a);
  st.psi6 = std::min(1.0, std::abs(sum) / double(count));

  // Exact circular least squares on the residues mod pi/3: the optimum is
  // the mean of one of the N cyclic unwrappings of the sorted residues.
  std::vector<double> beta(count);
  for (std::size_t i = 0; i < count; ++i) {
    double b = std::fmod(st.angles[i], kSixth);
    if (b >= kSixth) b -= kSixth;
    beta[i] = b;
  }
  std::sort(beta.begin(), beta.end());
  double s = 0.0, q = 0.0;
  for (double b : beta) {
    s += b;
    q += b * b;
  }
  const double nn = double(count);
  double best_cost = std::numeric_limits<double>::infinity();
  double best_mean = 0.0;
  double prefix = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    const double kk = double(k);
    const double mean = (s + kk * kSixth) / nn;
    const double cost = q + 2 * kSixth * prefix + kk * kSixth * kSixth - nn * mean * mean;
    if (cost < best_cost) {
      best_cost = cost;
      best_mean = mean;
    }
    prefix += beta[k];
  }
  double phi = std::fmod(best_mean, kSixth);
  if (phi < 0) phi += kSixth;
  st.best_rotation = phi;

  double abs_sum = 0.0;
  for (double a : st.angles) {
    const double x = (a - phi) / kSixth;
    const double cls = std::round(x);
    abs_sum += std::abs(x - cls) * kSixth;
    const long idx = ((static_cast<long>(cls) % 6) + 6) % 6;
    ++st.class_histogram[static_cast<std::size_t>(idx)];
  }
  st.mean_abs_deviation = abs_sum / nn;
  return st;
}

DirectionStats neighbor_direction_stats(const PointSet& ps) {
  if (ps.metric.dim != 2) throw Error(ErrorCode::InvalidArgument, "direction statistics are planar");
  std::vector<double> angles;
  angles.reserve(6 * ps.points.size());
  SpatialGrid grid(ps.metric, 1.0 + ps.alpha);
  grid.rebuild(ps.points);
  for (std::size_t i = 0; i < ps.points.size(); ++i) {
    int found = 0;
    grid.for_each_within(ps.points[i], 1.0 + ps.alpha, [&](const NeighborHit& hit) {
      const double d = hit.displacement.norm();
      if (d > 1.0 + kStrictGuard && d < 1.0 + ps.alpha - kStrictGuard) {
        angles.push_back(std::atan2(hit.displacement.y(), hit.displacement.x()));
        ++found;
      }
    });
    if (found != 6) {
      throw Error(ErrorCode::PreconditionViolated,
                  "point " + std::to_string(i) + " has " + std::to_string(found) + " annulus neighbours");
    }
  }
  return direction_stats_from_angles(std::move(angles));
}

DirectionStats neighbor_direction_stats(const Configuration& c) { return neighbor_direction_stats(c.point_set()); }

EntropyBound entropy_upper_bound(int n, double l, double alpha, double r) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "n must be >= 1");
  if (!(l > 1.0 && l < 1.0 + alpha)) throw Error(ErrorCode::ScaleOutOfRange, "l must lie in (1, 1 + alpha)");
  if (!(r > 0.0)) throw Error(ErrorCode::InvalidArgument, "radius must be positive");
  if (!(2 * r < std::min(l - 1.0, 1.0 + alpha - l)) || !(r < 0.5)) {
    throw Error(ErrorCode::RadiusTooLarge, "need 2r < min(l - 1, 1 + alpha - l) and r < 1/2");
  }
  const double s3 = std::sqrt(3.0);
  const double n2 = double(n) * double(n);
  const double lambda = n2 * l * l * s3 / 2.0;
  const double log_ball = std::log(std::numbers::pi * r * r);
  EntropyBound b;
  b.finite_n = 1.0 + n2 / lambda - std::log(lambda) / lambda - (n2 - 1.0) * log_ball / lambda;
  b.n_free = 1.0 + (2.0 - 2.0 * log_ball) / (l * l * s3);
  b.density = 2.0 / (l * l * s3);
  return b;
}

const std::array<std::array<int, 2>, 12>& octahedron_edges() noexcept { return kOctaEdges; }

double octahedron_volume_from_edges(const std::array<double, 12>& lengths, std::array<Point, 6>* vertices) {
  // Regular start in the gauge P0 = 0, P1 on the x axis, P2 in the xy plane.
  const double h = 1.0 / std::numbers::sqrt2;
  std::array<Point, 6> p{Point(h, 0, 0), Point(0, h, 0), Point(0, 0, h), Point(-h, 0, 0), Point(0, -h, 0), Point(0, 0, -h)};
  {
    const Point origin = p[0];
    const Eigen::Vector3d e1 = (p[1] - origin).normalized();
    const Eigen::Vector3d e2 = ((p[2] - origin) - (p[2] - origin).dot(e1) * e1).normalized();
    Eigen::Matrix3d frame;
    frame << e1, e2, e1.cross(e2);
    for (auto& q : p) q = frame.transpose() * (q - origin);
  }

  // Unknown slots: P1.x, P2.x, P2.y, then P3..P5 fully.
  auto slot = [](int vertex, int axis) -> int {
    if (vertex == 0) return -1;
    if (vertex == 1) return axis == 0 ? 0 : -1;
    if (vertex == 2) return axis < 2 ? 1 + axis : -1;
    return 3 + 3 * (vertex - 3) + axis;
  };

  Eigen::Matrix<double, 12, 1> residual;
  Eigen::Matrix<double, 12, 12> jac;
  bool converged = false;
  for (int iter = 0; iter < 60 && !converged; ++iter) {
    jac.setZero();
    for (int e = 0; e < 12; ++e) {
      const int a = kOctaEdges[static_cast<std::size_t>(e)][0];
      const int b = kOctaEdges[static_cast<std::size_t>(e)][1];
      const Point diff = p[static_cast<std::size_t>(a)] - p[static_cast<std::size_t>(b)];
      const double len = lengths[static_cast<std::size_t>(e)];
      residual[e] = diff.squaredNorm() - len * len;
      for (int axis = 0; axis < 3; ++axis) {
        if (const int sa = slot(a, axis); sa >= 0) jac(e, sa) += 2 * diff[axis];
        if (const int sb = slot(b, axis); sb >= 0) jac(e, sb) -= 2 * diff[axis];
      }
    }
    if (residual.norm() < 1e-15) {
      converged = true;
      break;
    }
    Eigen::FullPivLU<Eigen::Matrix<double, 12, 12>> lu(jac);
    if (!lu.isInvertible()) throw Error(ErrorCode::ConstructionFailure, "octahedron edge system is singular");
    const Eigen::Matrix<double, 12, 1> step = lu.solve(residual);
    for (int v = 1; v < 6; ++v) {
      for (int axis = 0; axis < 3; ++axis) {
        if (const int s = slot(v, axis); s >= 0) p[static_cast<std::size_t>(v)][axis] -= step[s];
      }
    }
    if (step.norm() < 1e-14 && residual.norm() < 1e-12) converged = true;
  }
  if (!converged) throw Error(ErrorCode::ConstructionFailure, "octahedron edge system did not converge");
  bool convex = false;
  try {
    convex = convex_image_check(p);
  } catch (const Error&) {
    convex = false;
  }
  if (!convex) throw Error(ErrorCode::ConstructionFailure, "perturbed octahedron is not convex");

  const double volume = signed_tetra_volume(p[0], p[3], p[1], p[2]) + signed_tetra_volume(p[0], p[3], p[2], p[4]) +
                        signed_tetra_volume(p[0], p[3], p[4], p[5]) + signed_tetra_volume(p[0], p[3], p[5], p[1]);
  if (vertices) *vertices = p;
  return std::abs(volume);
}

namespace {

void check_step(double eps) {
  if (!(eps > 0.0 && eps <= 1e-3)) throw Error(ErrorCode::InvalidArgument, "eps must lie in (0, 1e-3]");
}

}  // namespace

double octa_derivative_check(double eps) {
  check_step(eps);
  std::array<double, 12> plus{}, minus{};
  plus.fill(1.0);
  minus.fill(1.0);
  plus[4] = 1.0 + eps;  // ring edge (1, 2)
  minus[4] = 1.0 - eps;
  return (octahedron_volume_from_edges(plus) - octahedron_volume_from_edges(minus)) / (2 * eps);
}

double tetra_derivative_check(double eps) {
  check_step(eps);
  return (tetra_volume_heron(1.0 + eps, 1, 1, 1, 1, 1) - tetra_volume_heron(1.0 - eps, 1, 1, 1, 1, 1)) / (2 * eps);
}

BatchMeans batch_means(std::span<const double> series, int batches) {
  BatchMeans out;
  if (series.empty() || batches < 1) return out;
  const std::size_t count = series.size();
  const std::size_t b = std::min<std::size_t>(static_cast<std::size_t>(batches), count);
  out.batches = static_cast<int>(b);
  double total = 0.0;
  for (double v : series) total += v;
  out.mean = total / double(count);
  if (b < 2) return out;
  std::vector<double> means(b, 0.0);
  for (std::size_t k = 0; k < b; ++k) {
    const std::size_t lo = k * count / b;
    const std::size_t hi = (k + 1) * count / b;
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += series[i];
    means[k] = s / double(hi - lo);
  }
  double grand = 0.0;
  for (double m : means) grand += m;
  grand /= double(b);
  double var = 0.0;
  for (double m : means) var += (m - grand) * (m - grand);
  var /= double(b - 1);
  out.standard_error = std::sqrt(var / double(b));
  return out;
}

}  // namespace nearlattice
