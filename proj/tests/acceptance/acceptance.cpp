// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nearlattice/admissibility.hpp"
#include "nearlattice/enumerate.hpp"
#include "nearlattice/error.hpp"
#include "nearlattice/experiment.hpp"
#include "nearlattice/geometry.hpp"
#include "nearlattice/gibbs.hpp"
#include "nearlattice/observables.hpp"
#include "nearlattice/sampler.hpp"
#include "oracles.hpp"

using namespace nearlattice;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::shared_ptr<const Lattice> make(LatticeKind kind, int n) {
  return std::make_shared<const Lattice>(Lattice::build(kind, n));
}

std::vector<Configuration> thinned_samples(LatticeKind kind, int n, double l, double alpha, long count, long thin,
                                           std::uint64_t seed) {
  SamplerParams p;
  p.seed = seed;
  p.burn_in = 1000;
  p.thin = thin;
  p.sweeps = count * thin;
  std::vector<Configuration> out;
  metropolis_run(scaled_lattice_config(make(kind, n), l, alpha), p,
                 [&](const Configuration& c, long) { out.push_back(c); });
  return out;
}

// Edge-length tuples in [1, 1.5]^6 that embed; the determinant volume comes
// from an explicit vertex placement of the same lengths.
Outcome heron_vs_determinant() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(1.0, 1.5);
  double worst = 0;
  int tested = 0;
  long rejected = 0;
  while (tested < 100000) {
    std::array<double, 6> e;
    for (auto& x : e) x = u(rng);
    const auto p = oracle::place_tetrahedron(e[0], e[1], e[2], e[3], e[4], e[5]);
    if (!p) {
      ++rejected;
      continue;
    }
    const auto& q = *p;
    const double det = std::abs(signed_tetra_volume(q[0], q[1], q[2], q[3]));
    const double heron = tetra_volume_heron(e[0], e[1], e[2], e[3], e[4], e[5]);
    worst = std::max(worst, std::abs(heron - det) / std::max(heron, det));
    ++tested;
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-10 && secs < 10,
          fmt("%d embeddable tuples in [1, 1.5] (%ld non-embeddable skipped), max |heron - det| / max %.3e (<= 1e-10), "
              "%.2f s (< 10 s)",
              tested, rejected, worst, secs)};
}

Outcome taylor_coefficients() {
  const double tet = tetra_derivative_check(1e-5);
  const double oct = octa_derivative_check(1e-5);
  const double et = std::abs(tet - 1 / (12 * std::numbers::sqrt2));
  const double eo = std::abs(oct - 1 / (6 * std::numbers::sqrt2));
  return {et <= 1e-6 && eo <= 1e-4,
          fmt("tetra %.10f (err %.2e <= 1e-6), octa %.10f (err %.2e <= 1e-4)", tet, et, oct, eo)};
}

struct SampleSets {
  std::vector<Configuration> planar;
  std::vector<Configuration> fcc;
};

const SampleSets& identity_samples() {
  static const SampleSets sets{thinned_samples(LatticeKind::Triangular2D, 8, 1.06, 0.15, 1000, 20, 301),
                               thinned_samples(LatticeKind::FCC, 4, 1.05, 0.10, 1000, 20, 302)};
  return sets;
}

Outcome volume_sum_identity() {
  const auto& s = identity_samples();
  long ok = 0, total = 0;
  double worst = 0;
  for (const auto* set : {&s.planar, &s.fcc}) {
    for (const auto& c : *set) {
      const double vol = c.lattice().period_cell_volume();
      const double r = std::abs(volume_sum_check(c));
      worst = std::max(worst, r / vol);
      ok += r <= 1e-9 * vol;
      ++total;
    }
  }
  return {ok == total && s.planar.size() == 1000 && s.fcc.size() == 1000,
          fmt("%ld/%ld samples (2D n=8: %zu, FCC n=4: %zu), max |residual|/vol %.3e (<= 1e-9)", ok, total,
              s.planar.size(), s.fcc.size(), worst)};
}

Outcome mean_jacobian_identity() {
  const auto& s = identity_samples();
  long ok = 0, total = 0;
  double worst = 0;
  for (const auto* set : {&s.planar, &s.fcc}) {
    for (const auto& c : *set) {
      const auto st = deviation_statistics(c);
      const double err = (st.mean_jacobian - c.l() * SquareMatrix::Identity(c.dim(), c.dim())).cwiseAbs().maxCoeff();
      worst = std::max(worst, err);
      ok += err <= 1e-10;
      ++total;
    }
  }
  return {ok == total, fmt("%ld/%ld samples, max entrywise |mean J - l Id| %.3e (<= 1e-10)", ok, total, worst)};
}

Outcome ball_sampler_containment() {
  const auto lat = make(LatticeKind::Triangular2D, 4);
  long failures = 0;
  for (std::uint64_t s = 0; s < 10000; ++s) {
    if (!check_admissibility(ball_sample(lat, 1.15, 0.3, 0.07, s)).overall()) ++failures;
  }
  return {failures == 0, fmt("10000 draws at n=4, l=1.15, alpha=0.3, r=0.07: %ld admissibility failures", failures)};
}

Outcome enumeration_round_trip() {
  const auto samples = thinned_samples(LatticeKind::Triangular2D, 8, 1.06, 0.15, 1000, 20, 601);
  std::mt19937_64 rng(602);
  long recovered = 0, detected = 0;
  for (const auto& c : samples) {
    const PointSet base = c.point_set();
    std::vector<int> perm(base.points.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    PointSet ps = base;
    for (std::size_t site = 0; site < perm.size(); ++site) ps.points[static_cast<std::size_t>(perm[site])] = base.points[site];
    auto norm = [](std::vector<std::pair<int, int>> e) {
      for (auto& [a, b] : e) {
        if (a > b) std::swap(a, b);
      }
      std::sort(e.begin(), e.end());
      return e;
    };
    try {
      const Labeling lab = enumerate_points(ps);
      if (norm(labeled_edges(lab)) == norm(configuration_edges(c.lattice(), perm))) ++recovered;
    } catch (const Error&) {
    }
    std::uniform_int_distribution<std::size_t> pick(0, ps.points.size() - 1);
    ps.points.erase(ps.points.begin() + static_cast<std::ptrdiff_t>(pick(rng)));
    try {
      enumerate_points(ps);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NotEnumerable) ++detected;
    }
  }
  const long n = static_cast<long>(samples.size());
  return {n == 1000 && recovered == n && detected == n,
          fmt("round-trip %ld/%ld edge-set identical, deletion detected %ld/%ld", recovered, n, detected, n)};
}

struct TrendRuns {
  std::vector<GridPointResult> planar;  // l = 1.12, 1.06, 1.03
  std::vector<GridPointResult> fcc;     // l = 1.06, 1.03
  double seconds = 0;
};

const TrendRuns& trend_runs() {
  static const TrendRuns runs = [] {
    const auto t0 = Clock::now();
    TrendRuns r;
    ExperimentSpec s;
    s.sweeps = 100000;
    s.burn_in = 10000;
    s.thin = 100;
    s.seed = 700;
    s.lattice = LatticeKind::Triangular2D;
    std::uint64_t k = 0;
    for (double l : {1.12, 1.06, 1.03}) r.planar.push_back(run_grid_point(s, 8, l, derive_seed(s.seed, k++)));
    s.lattice = LatticeKind::FCC;
    s.observables = {"deviation", "volume"};
    for (double l : {1.06, 1.03}) r.fcc.push_back(run_grid_point(s, 4, l, derive_seed(s.seed, k++)));
    r.seconds = seconds_since(t0);
    return r;
  }();
  return runs;
}

// Strictly decreasing with separated one-standard-error bars.
bool separated_decrease(const std::vector<BatchMeans>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i].mean + v[i].standard_error < v[i - 1].mean - v[i - 1].standard_error)) return false;
  }
  return true;
}

std::string series(const std::vector<GridPointResult>& pts, BatchMeans GridPointResult::*field) {
  std::string s;
  for (const auto& p : pts) s += fmt("l=%.2f: %.6f +- %.1e; ", p.l, (p.*field).mean, (p.*field).standard_error);
  return s;
}

Outcome rigidity_trend() {
  const auto& r = trend_runs();
  std::vector<BatchMeans> planar, fcc;
  bool invariants = true;
  for (const auto& p : r.planar) {
    planar.push_back(p.dev_id);
    invariants = invariants && p.invariants_ok;
  }
  for (const auto& p : r.fcc) {
    fcc.push_back(p.dev_id);
    invariants = invariants && p.invariants_ok;
  }
  const bool half = planar[2].mean < 0.5 * planar[0].mean;
  const bool pass = invariants && separated_decrease(planar) && half && separated_decrease(fcc) && r.seconds < 1800;
  return {pass, fmt("2D n=8 mean_dev_id %sratio(1.03/1.12) %.3f (< 0.5); FCC n=4 %sinvariants %s; %.0f s (< 1800 s)",
                    series(r.planar, &GridPointResult::dev_id).c_str(), planar[2].mean / planar[0].mean,
                    series(r.fcc, &GridPointResult::dev_id).c_str(), invariants ? "ok" : "violated", r.seconds)};
}

Outcome orientational_order() {
  const auto& r = trend_runs();
  std::vector<BatchMeans> ang;
  for (const auto& p : r.planar) ang.push_back(p.ang_dev);
  bool decreasing = true;
  for (std::size_t i = 1; i < ang.size(); ++i) decreasing = decreasing && ang[i].mean < ang[i - 1].mean;
  double worst_psi = 0;
  for (int n : {4, 8, 16}) {
    const auto st = neighbor_direction_stats(scaled_lattice_config(make(LatticeKind::Triangular2D, n), 1.06, 0.15));
    worst_psi = std::max(worst_psi, std::abs(st.psi6 - 1.0));
  }
  const bool perfect = worst_psi == 0.0;
  return {decreasing && perfect,
          fmt("2D n=8 mean_ang_dev %sstrictly decreasing: %s; perfect lattice max |psi6 - 1| = %.1e (exact: %s)",
              series(r.planar, &GridPointResult::ang_dev).c_str(), decreasing ? "yes" : "no", worst_psi,
              perfect ? "yes" : "no")};
}

Outcome partition_closed_form() {
  const auto est = estimate_partition(Window::disk(Point::Zero(), 0.4), {}, 0.15, 1.0, 1000000, 901);
  const double exact = std::exp(-0.16 * std::numbers::pi);
  const double rel = std::abs(est.estimate - exact) / exact;
  return {rel <= 0.02, fmt("estimate %.5f +- %.5f vs %.5f, relative error %.4f (<= 0.02)", est.estimate,
                           est.standard_error, exact, rel)};
}

Outcome rotation_distance_oracle() {
  std::mt19937_64 rng(1001);
  std::uniform_real_distribution<double> u(-2, 2);
  double worst = 0;
  for (int t = 0; t < 1000; ++t) {
    Eigen::Matrix3d a;
    for (int i = 0; i < 9; ++i) a(i / 3, i % 3) = u(rng);
    worst = std::max(worst, std::abs(dist_to_rotations(a) - oracle::rotation_grid_distance(a)));
  }
  return {worst <= 1e-4, fmt("1000 random matrices, max |svd - grid| %.3e (<= 1e-4)", worst)};
}

Outcome sweep_determinism() {
#ifdef NEARLATTICE_CLI_PATH
  const fs::path root = fs::temp_directory_path() / "nearlattice_acceptance_determinism";
  fs::remove_all(root);
  std::vector<std::string> csv;
  for (const char* run : {"a", "b"}) {
    const fs::path out = root / run;
    const std::string cmd = std::string("\"") + NEARLATTICE_CLI_PATH +
                            "\" sweep --lattice triangular --n 4,6 --l 1.1,1.04 --seed 11 --sweeps 2000 "
                            "--burn-in 200 --thin 20 -q --out \"" + out.string() + "\"";
    if (std::system(cmd.c_str()) != 0) return {false, "sweep invocation failed: " + cmd};
    std::ifstream in(out / "results.csv", std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    csv.push_back(ss.str());
  }
  fs::remove_all(root);
  const bool same = !csv[0].empty() && csv[0] == csv[1];
  return {same, fmt("two sweep runs, results.csv %zu bytes, byte-identical: %s", csv[0].size(), same ? "yes" : "no")};
#else
  return {false, "command line tool not built"};
#endif
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"heron-determinant equivalence", heron_vs_determinant},
      {"taylor coefficients", taylor_coefficients},
      {"volume-sum identity", volume_sum_identity},
      {"mean-jacobian identity", mean_jacobian_identity},
      {"ball-sampler containment", ball_sampler_containment},
      {"enumeration round-trip", enumeration_round_trip},
      {"rigidity trend", rigidity_trend},
      {"orientational order", orientational_order},
      {"partition closed form", partition_closed_form},
      {"dist_to_rotations oracle", rotation_distance_oracle},
      {"sweep determinism", sweep_determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("[%s] %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - std::size_t(failed), criteria.size());
  return failed ? 1 : 0;
}
