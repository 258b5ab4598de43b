#include <gtest/gtest.h>

#include <algorithm>
#include <chrono>
#include <numeric>
#include <random>

#include <Eigen/Geometry>

#include "nearlattice/enumerate.hpp"
#include "nearlattice/error.hpp"
#include "oracles.hpp"

using namespace nearlattice;

namespace {

using EdgeList = std::vector<std::pair<int, int>>;

EdgeList sorted(EdgeList e) {
  for (auto& [a, b] : e) {
    if (a > b) std::swap(a, b);
  }
  std::sort(e.begin(), e.end());
  return e;
}

struct Shuffled {
  PointSet ps;
  std::vector<int> point_of_site;
};

Shuffled shuffle_labels(const Configuration& c, std::uint64_t seed) {
  PointSet base = c.point_set();
  std::vector<int> perm(base.points.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  Shuffled s{base, std::vector<int>(perm.size())};
  for (std::size_t site = 0; site < perm.size(); ++site) {
    s.ps.points[static_cast<std::size_t>(perm[site])] = base.points[site];
    s.point_of_site[site] = perm[site];
  }
  return s;
}

EdgeList annulus_pairs(const PointSet& ps) {
  EdgeList out;
  for (std::size_t i = 0; i < ps.points.size(); ++i) {
    for (std::size_t j = i + 1; j < ps.points.size(); ++j) {
      const double d = ps.metric.distance(ps.points[i], ps.points[j]);
      if (d > 1.0 && d < 1.0 + ps.alpha) out.emplace_back(int(i), int(j));
    }
  }
  return out;
}

void expect_round_trip(const Configuration& c, std::uint64_t seed) {
  const Shuffled s = shuffle_labels(c, seed);
  const Labeling lab = enumerate_points(s.ps);
  EXPECT_EQ(lab.n, c.lattice().n());
  std::vector<int> seen(lab.point_of_site);
  std::sort(seen.begin(), seen.end());
  for (std::size_t i = 0; i < seen.size(); ++i) ASSERT_EQ(seen[i], int(i));
  for (std::size_t p = 0; p < lab.site_of_point.size(); ++p) {
    EXPECT_EQ(lab.point_of_site[static_cast<std::size_t>(lab.site_of_point[p])], int(p));
  }
  const EdgeList truth = sorted(configuration_edges(c.lattice(), s.point_of_site));
  EXPECT_EQ(sorted(labeled_edges(lab)), truth);
  EXPECT_EQ(sorted(configuration_edges(c.lattice(), lab.point_of_site)), truth);
  EXPECT_EQ(std::abs(lab.period_map.determinant()), 1);
}

}  // namespace

TEST(Enumerate, ScaledLatticeRoundTrip) {
  for (int n : {1, 2, 3, 4, 7}) {
    const auto lat = std::make_shared<const Lattice>(Lattice::build(LatticeKind::Triangular2D, n));
    expect_round_trip(scaled_lattice_config(lat, 1.05, 0.15), std::uint64_t(n));
  }
}

TEST(Enumerate, SampledConfigurationsRoundTrip) {
  int checked = 0;
  for (int n : {4, 8}) {
    for (double l : {1.03, 1.12}) {
      for (const auto& c : oracle::chain_samples(LatticeKind::Triangular2D, n, l, 0.15, 1000, 50, 40 + n)) {
        expect_round_trip(c, std::uint64_t(checked++));
      }
    }
  }
  EXPECT_EQ(checked, 80);
}

TEST(Enumerate, LabeledBondsAreExactlyTheAnnulusPairs) {
  for (const auto& c : oracle::chain_samples(LatticeKind::Triangular2D, 5, 1.08, 0.15, 400, 100, 3)) {
    const Shuffled s = shuffle_labels(c, 9);
    EXPECT_EQ(sorted(labeled_edges(enumerate_points(s.ps))), sorted(annulus_pairs(s.ps)));
  }
}

TEST(Enumerate, DeletedPointIsNotEnumerable) {
  const auto samples = oracle::chain_samples(LatticeKind::Triangular2D, 6, 1.06, 0.15, 200, 100, 5);
  for (const auto& c : samples) {
    PointSet ps = shuffle_labels(c, 1).ps;
    ps.points.erase(ps.points.begin() + 7);
    try {
      enumerate_points(ps);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::NotEnumerable);
    }
  }
}

TEST(Enumerate, DisplacedPointIsNotEnumerable) {
  const auto lat = std::make_shared<const Lattice>(Lattice::build(LatticeKind::Triangular2D, 6));
  PointSet ps = scaled_lattice_config(lat, 1.05, 0.15).point_set();
  ps.points[10] += Point(0.4, 0.1, 0);
  ps.points[10] = ps.metric.wrap(ps.points[10]);
  EXPECT_THROW(enumerate_points(ps), Error);
}

TEST(Enumerate, EquivariantUnderTranslationAndSixfoldRotation) {
  const Eigen::Matrix3d rot = Eigen::AngleAxisd(std::numbers::pi / 3, Eigen::Vector3d::UnitZ()).toRotationMatrix();
  for (const auto& c : oracle::chain_samples(LatticeKind::Triangular2D, 6, 1.07, 0.15, 300, 100, 12)) {
    const PointSet ps = shuffle_labels(c, 4).ps;
    const EdgeList base = sorted(labeled_edges(enumerate_points(ps)));
    PointSet moved = ps;
    for (auto& p : moved.points) p = moved.metric.wrap(p + Point(3.3, -1.7, 0));
    EXPECT_EQ(sorted(labeled_edges(enumerate_points(moved))), base);
    // The image torus is invariant under rotation by pi/3.
    PointSet turned = ps;
    for (auto& p : turned.points) p = turned.metric.wrap(rot * p);
    EXPECT_EQ(sorted(labeled_edges(enumerate_points(turned))), base);
  }
}

TEST(Enumerate, TenThousandPointsUnderOneSecond) {
  const auto lat = std::make_shared<const Lattice>(Lattice::build(LatticeKind::Triangular2D, 100));
  const Shuffled s = shuffle_labels(scaled_lattice_config(lat, 1.05, 0.15), 2);
  const auto t0 = std::chrono::steady_clock::now();
  const Labeling lab = enumerate_points(s.ps);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_EQ(lab.point_of_site.size(), 10000u);
  EXPECT_LT(secs, 1.0);
  EXPECT_EQ(sorted(labeled_edges(lab)), sorted(configuration_edges(*lat, s.point_of_site)));
}

TEST(Enumerate, RejectsNonTorusInput) {
  PointSet ps;
  ps.points = {Point::Zero()};
  EXPECT_THROW(enumerate_points(ps), Error);
}
