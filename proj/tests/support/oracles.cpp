#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include "nearlattice/sampler.hpp"

namespace nearlattice::oracle {

std::optional<std::array<Point, 4>> place_tetrahedron(double u, double v, double w, double U, double V, double W) {
  const double x2 = (u * u + v * v - W * W) / (2 * u);
  const double y2sq = v * v - x2 * x2;
  if (y2sq <= 0) return std::nullopt;
  const double y2 = std::sqrt(y2sq);
  const double x3 = (u * u + w * w - V * V) / (2 * u);
  const double y3 = (v * v + w * w - U * U - 2 * x2 * x3) / (2 * y2);
  const double z3sq = w * w - x3 * x3 - y3 * y3;
  if (z3sq <= 0) return std::nullopt;
  return std::array<Point, 4>{Point(0, 0, 0), Point(u, 0, 0), Point(x2, y2, 0), Point(x3, y3, std::sqrt(z3sq))};
}

namespace {

double frob_distance(const Eigen::Matrix3d& a, const Eigen::Matrix3d& r) { return (a - r).norm(); }

Eigen::Matrix3d exp_so3(const Eigen::Vector3d& w) {
  const double angle = w.norm();
  if (angle == 0) return Eigen::Matrix3d::Identity();
  return Eigen::AngleAxisd(angle, w / angle).toRotationMatrix();
}

}  // namespace

double rotation_grid_distance(const Eigen::Matrix3d& a) {
  constexpr int kSteps = 9;
  Eigen::Matrix3d best = Eigen::Matrix3d::Identity();
  double best_d = frob_distance(a, best);
  for (int i = 0; i <= kSteps; ++i) {
    for (int j = 0; j <= kSteps; ++j) {
      for (int k = 0; k <= kSteps; ++k) {
        for (int m = 0; m <= kSteps; ++m) {
          const Eigen::Vector4d q(-1.0 + 2.0 * i / kSteps, -1.0 + 2.0 * j / kSteps, -1.0 + 2.0 * k / kSteps,
                                  -1.0 + 2.0 * m / kSteps);
          if (q.norm() < 1e-9) continue;
          const Eigen::Quaterniond quat(q.normalized()(0), q.normalized()(1), q.normalized()(2), q.normalized()(3));
          const Eigen::Matrix3d r = quat.toRotationMatrix();
          const double d = frob_distance(a, r);
          if (d < best_d) {
            best_d = d;
            best = r;
          }
        }
      }
    }
  }
  // Refine with a 5x5x5 grid of small rotations around the incumbent.
  for (double h = 0.2; h > 1e-9; h *= 0.5) {
    bool improved = true;
    while (improved) {
      improved = false;
      for (int i = -2; i <= 2; ++i) {
        for (int j = -2; j <= 2; ++j) {
          for (int k = -2; k <= 2; ++k) {
            const Eigen::Matrix3d r = best * exp_so3(h * Eigen::Vector3d(i, j, k));
            const double d = frob_distance(a, r);
            if (d < best_d - 1e-15) {
              best_d = d;
              best = r;
              improved = true;
            }
          }
        }
      }
    }
  }
  return best_d;
}

std::vector<NaiveHit> naive_annulus(std::span<const Point> points, const TorusMetric& metric, const Point& x,
                                    double r_lo, double r_hi) {
  std::vector<NaiveHit> out;
  const int reach = metric.periodic ? 2 : 0;
  const int dz = metric.dim == 3 ? reach : 0;
  for (int j = 0; j < static_cast<int>(points.size()); ++j) {
    for (int a = -reach; a <= reach; ++a) {
      for (int b = -reach; b <= reach; ++b) {
        for (int c = -dz; c <= dz; ++c) {
          const Offset s(a, b, c);
          const Point y = points[static_cast<std::size_t>(j)] + metric.periods * s.cast<double>();
          const double d = (y - x).norm();
          if (d > r_lo && d < r_hi) out.push_back(NaiveHit{j, s, d});
        }
      }
    }
  }
  return out;
}

int simplices_containing(const Lattice& lattice, const Point& p, double tol) {
  const int d = lattice.dim();
  const Eigen::Matrix3d torus = double(lattice.n()) * lattice.periods();
  int count = 0;
  for (const Simplex& s : lattice.triangulation()) {
    std::array<Point, 4> v;
    for (int k = 0; k < s.vertex_count; ++k) v[static_cast<std::size_t>(k)] = lattice.reference_position(s.vertices[static_cast<std::size_t>(k)]);
    Eigen::MatrixXd m(d, d);
    for (int k = 0; k < d; ++k) m.col(k) = (v[static_cast<std::size_t>(k + 1)] - v[0]).head(d);
    const Eigen::MatrixXd inv = m.inverse();
    const int dz = d == 3 ? 2 : 0;
    for (int a = -2; a <= 2; ++a) {
      for (int b = -2; b <= 2; ++b) {
        for (int c = -dz; c <= dz; ++c) {
          const Point shift = torus * Eigen::Vector3d(a, b, c);
          const Eigen::VectorXd lambda = inv * (p - v[0] - shift).head(d);
          const double l0 = 1.0 - lambda.sum();
          if (lambda.minCoeff() >= -tol && l0 >= -tol) ++count;
        }
      }
    }
  }
  return count;
}

std::vector<LatticeRef> brute_force_shell(const Lattice& lattice, int site) {
  const Site& s = lattice.sites()[static_cast<std::size_t>(site)];
  std::vector<Point> basis;
  for (int b = 0; b < lattice.basis_size(); ++b) {
    basis.push_back(lattice.sites()[static_cast<std::size_t>(lattice.site_id(Offset::Zero(), b))].position);
  }
  const Point here = lattice.periods() * s.coord.cast<double>() + basis[static_cast<std::size_t>(s.basis)];
  std::vector<LatticeRef> out;
  const int dz = lattice.dim() == 3 ? 2 : 0;
  for (int a = -2; a <= 2; ++a) {
    for (int b = -2; b <= 2; ++b) {
      for (int c = -dz; c <= dz; ++c) {
        for (int beta = 0; beta < lattice.basis_size(); ++beta) {
          const Offset coord = s.coord + Offset(a, b, c);
          const Point there = lattice.periods() * coord.cast<double>() + basis[static_cast<std::size_t>(beta)];
          if (std::abs((there - here).norm() - 1.0) < 1e-9) out.push_back(lattice.reduce(coord, beta));
        }
      }
    }
  }
  return out;
}

std::vector<Configuration> chain_samples(LatticeKind kind, int n, double l, double alpha, long sweeps, long thin,
                                         std::uint64_t seed) {
  auto lattice = std::make_shared<const Lattice>(Lattice::build(kind, n));
  SamplerParams p;
  p.seed = seed;
  p.sweeps = sweeps;
  p.burn_in = std::min<long>(100, sweeps);
  p.thin = thin;
  std::vector<Configuration> out;
  metropolis_run(scaled_lattice_config(lattice, l, alpha), p, [&](const Configuration& c, long) { out.push_back(c); });
  return out;
}

}  // namespace nearlattice::oracle
