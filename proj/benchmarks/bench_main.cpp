#include <benchmark/benchmark.h>

#include <random>

#include "nearlattice/admissibility.hpp"
#include "nearlattice/enumerate.hpp"
#include "nearlattice/geometry.hpp"
#include "nearlattice/observables.hpp"
#include "nearlattice/sampler.hpp"

using namespace nearlattice;

namespace {

std::shared_ptr<const Lattice> make(LatticeKind kind, int n) {
  return std::make_shared<const Lattice>(Lattice::build(kind, n));
}

LatticeKind kind_of(int64_t k) {
  return k == 0 ? LatticeKind::Triangular2D : k == 1 ? LatticeKind::FCC : LatticeKind::HCP;
}

void BM_Sweeps(benchmark::State& state) {
  const LatticeKind kind = kind_of(state.range(0));
  const int n = static_cast<int>(state.range(1));
  const Configuration c0 = scaled_lattice_config(make(kind, n), 1.05, default_alpha(dimension_of(kind)));
  SamplerParams p;
  p.sweeps = 10;
  p.burn_in = 0;
  long proposals = 0;
  for (auto _ : state) {
    const auto r = metropolis_run(c0, p);
    proposals += r.stats.proposals;
    ++p.seed;
  }
  state.SetItemsProcessed(proposals);
  state.SetLabel(std::string(to_string(kind)));
}
BENCHMARK(BM_Sweeps)->Args({0, 8})->Args({0, 32})->Args({1, 4})->Args({2, 4})->Unit(benchmark::kMillisecond);

void BM_LocalCheck(benchmark::State& state) {
  const LatticeKind kind = kind_of(state.range(0));
  const Configuration c = scaled_lattice_config(make(kind, 4), 1.05, default_alpha(dimension_of(kind)));
  const LocalChecker checker(c);
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> site(1, c.lattice().site_count() - 1);
  for (auto _ : state) {
    const int s = site(rng);
    benchmark::DoNotOptimize(checker.check_move(c, s, c.position(s) + uniform_in_ball(rng, c.dim(), 0.01)));
  }
  state.SetItemsProcessed(state.iterations());
  state.SetLabel(std::string(to_string(kind)));
}
BENCHMARK(BM_LocalCheck)->Arg(0)->Arg(1)->Arg(2);

void BM_FullCheck(benchmark::State& state) {
  const LatticeKind kind = kind_of(state.range(0));
  const Configuration c =
      scaled_lattice_config(make(kind, static_cast<int>(state.range(1))), 1.05, default_alpha(dimension_of(kind)));
  for (auto _ : state) benchmark::DoNotOptimize(check_admissibility(c).overall());
  state.SetLabel(std::string(to_string(kind)));
}
BENCHMARK(BM_FullCheck)->Args({0, 8})->Args({0, 32})->Args({1, 4})->Unit(benchmark::kMillisecond);

void BM_Enumerate(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const PointSet ps = scaled_lattice_config(make(LatticeKind::Triangular2D, n), 1.05, 0.15).point_set();
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_points(ps).n);
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_Enumerate)->Arg(16)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_AnnulusQuery(benchmark::State& state) {
  const PointSet ps = scaled_lattice_config(make(LatticeKind::Triangular2D, 100), 1.05, 0.15).point_set();
  SpatialGrid grid(ps.metric, 1.15);
  grid.rebuild(ps.points);
  std::size_t i = 0;
  for (auto _ : state) {
    int count = 0;
    grid.for_each_within(ps.points[i++ % ps.points.size()], 1.15, [&](const NeighborHit&) { ++count; });
    benchmark::DoNotOptimize(count);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_AnnulusQuery);

void BM_DeviationStats(benchmark::State& state) {
  const Configuration c = scaled_lattice_config(make(LatticeKind::FCC, 4), 1.05, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(deviation_statistics(c).mean_dev_id);
}
BENCHMARK(BM_DeviationStats)->Unit(benchmark::kMicrosecond);

void BM_Heron(benchmark::State& state) {
  double x = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tetra_volume_heron(x, 1.1, 1.05, 1.02, 1.08, 1.03));
    x = x < 1.1 ? x + 1e-6 : 1.0;
  }
}
BENCHMARK(BM_Heron);

void BM_DistToRotations(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  SquareMatrix a(3, 3);
  for (int i = 0; i < 9; ++i) a(i / 3, i % 3) = g(rng);
  for (auto _ : state) benchmark::DoNotOptimize(dist_to_rotations_sq(a));
}
BENCHMARK(BM_DistToRotations);

}  // namespace
BENCHMARK_MAIN();
