#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <string>

#include <CLI11.hpp>

#include "nearlattice/enumerate.hpp"
#include "nearlattice/error.hpp"
#include "nearlattice/experiment.hpp"
#include "nearlattice/gibbs.hpp"
#include "nearlattice/hamiltonian.hpp"
#include "nearlattice/snapshot.hpp"

namespace nl = nearlattice;

namespace {

enum Exit { kOk = 0, kInvariant = 1, kSpec = 2 };

// Flag values are kept as text and funnelled through ExperimentSpec::set so
// flags and spec files share one parser.
struct SpecFlags {
  std::map<std::string, std::string> values;
  std::string spec_file;
  bool no_auto_tune = false;
  bool cells = false;
  bool no_check = false;

  void attach(CLI::App& app, bool grid) {
    app.add_option("--spec", spec_file, "key = value spec file; its entries override flags")->check(CLI::ExistingFile);
    add(app, "--lattice", "lattice", "triangular, fcc or hcp");
    add(app, "--n", "n", grid ? "comma separated list of n" : "periodicity n");
    add(app, "--l", "l", grid ? "comma separated list of l" : "scale l");
    add(app, "--alpha", "alpha", "annulus width (default 0.15 in 2D, 0.10 in 3D)");
    add(app, "--seed", "seed", "master seed");
    add(app, "--sweeps", "sweeps", "production sweeps after burn-in");
    add(app, "--burn-in", "burn_in", "burn-in sweeps");
    add(app, "--thin", "thin", "observe every thin-th sweep");
    add(app, "--proposal-radius", "proposal_radius", "number or 'auto'");
    add(app, "--observables", "observables", "subset of deviation,directions,volume");
    add(app, "--workers", "workers", "worker threads (0 = all cores)");
    add(app, "--out", "output_dir", "output directory");
    app.add_flag("--no-auto-tune", no_auto_tune, "freeze the proposal radius during burn-in");
    app.add_flag("--no-check", no_check, "skip per-sample invariant checks");
    if (grid) app.add_flag("--cells", cells, "also write cells.csv");
  }

  void add(CLI::App& app, const std::string& flag, const std::string& key, const std::string& help) {
    app.add_option(flag, values[key], help);
  }

  nl::ExperimentSpec build() const {
    nl::ExperimentSpec spec;
    for (const auto& [key, value] : values) {
      if (!value.empty()) spec.set(key, value);
    }
    if (no_auto_tune) spec.auto_tune = false;
    if (no_check) spec.check_invariants = false;
    if (cells) spec.write_cells = true;
    if (!spec_file.empty()) spec = nl::parse_spec_file(spec_file, spec);
    return spec;
  }
};

void print_stats(const nl::GridPointResult& r) {
  std::cout << "n " << r.n << "  l " << nl::format_double(r.l) << "  seed " << r.seed << '\n'
            << "sweeps " << r.stats.sweeps_completed << "  samples " << r.samples << '\n'
            << "acceptance " << r.stats.acceptance_rate << "  radius " << r.stats.proposal_radius << '\n'
            << "rejected omega1..4 " << r.stats.rejected_by[0] << ' ' << r.stats.rejected_by[1] << ' '
            << r.stats.rejected_by[2] << ' ' << r.stats.rejected_by[3] << '\n'
            << "mean_dev_id " << r.dev_id.mean << " +- " << r.dev_id.standard_error << '\n'
            << "mean_dev_lid " << r.dev_lid.mean << " +- " << r.dev_lid.standard_error << '\n';
  if (std::isfinite(r.psi6.mean)) {
    std::cout << "psi6 " << r.psi6.mean << " +- " << r.psi6.standard_error << '\n'
              << "mean_ang_dev " << r.ang_dev.mean << " +- " << r.ang_dev.standard_error << '\n';
  }
  std::cout << "max |vol residual| " << r.max_abs_vol_residual << '\n';
}

int run_sample(const SpecFlags& flags, const std::string& snapshot_path) {
  nl::ExperimentSpec spec = flags.build();
  if (spec.n_list.empty()) spec.n_list = {8};
  if (spec.l_list.empty()) spec.l_list = {1.06};
  spec.validate();
  if (spec.n_list.size() != 1 || spec.l_list.size() != 1) {
    throw nl::Error(nl::ErrorCode::SpecError, "sample runs a single (n, l); use sweep for grids");
  }
  const int n = spec.n_list[0];
  const double l = spec.l_list[0];
  auto lattice = std::make_shared<const nl::Lattice>(nl::Lattice::build(spec.lattice, n));
  nl::Configuration final_state = nl::scaled_lattice_config(lattice, l, spec.effective_alpha());
  const auto r = nl::run_grid_point(spec, n, l, nl::derive_seed(spec.seed, 0), &final_state);
  print_stats(r);
  if (!snapshot_path.empty()) {
    const std::filesystem::path path(snapshot_path);
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    nl::save_snapshot(path, final_state, r.seed, r.stats.sweeps_completed);
  }
  if (!r.invariants_ok) {
    std::cerr << "invariant violation: " << r.first_failure << '\n';
    return kInvariant;
  }
  return kOk;
}

int run_sweep(const SpecFlags& flags, bool quiet) {
  const nl::ExperimentSpec spec = flags.build();
  const auto result = nl::run_experiment(spec, quiet ? nullptr : &std::cerr);
  if (!result.invariants_ok) {
    std::cerr << "invariant violation: " << result.first_failure << '\n';
    return kInvariant;
  }
  return kOk;
}

int run_check(const std::string& path) {
  const nl::Snapshot snap = nl::load_snapshot(path);
  const auto report = nl::check_admissibility(snap.config);
  auto line = [](const char* name, const nl::ConditionResult& c) {
    std::cout << name << ' ' << (c.pass ? "pass" : "FAIL");
    if (!c.pass) std::cout << " (" << c.witnesses.size() << " witnesses)";
    std::cout << '\n';
  };
  line("omega1", report.omega1);
  line("omega2", report.omega2);
  line("omega3", report.omega3);
  line("omega4", report.omega4);
  bool ok = report.overall();
  if (snap.config.dim() == 2) {
    const auto h = nl::hamiltonian_zero(snap.config.point_set());
    std::cout << "hamiltonian " << (h.zero ? "zero" : "infinite") << '\n';
    ok = ok && h.zero;
  }
  if (!ok) {
    std::cerr << "first failure: " << (report.overall() ? "hamiltonian" : report.first_failure()) << '\n';
    return kInvariant;
  }
  return kOk;
}

int run_enumerate(const std::string& path, const std::string& output) {
  const nl::Snapshot snap = nl::load_snapshot(path);
  if (snap.config.dim() != 2) throw nl::Error(nl::ErrorCode::NotEnumerable, "enumeration is planar only");
  const nl::Labeling lab = nl::enumerate_points(snap.config.point_set());
  std::ofstream file;
  if (!output.empty()) {
    file.open(output);
    if (!file) throw nl::Error(nl::ErrorCode::InvalidArgument, "cannot write " + output);
  }
  std::ostream& out = output.empty() ? std::cout : file;
  out << "site,i,j,point_index\n";
  for (int site = 0; site < lab.n * lab.n; ++site) {
    out << site << ',' << site / lab.n << ',' << site % lab.n << ',' << lab.point_of_site[static_cast<std::size_t>(site)]
        << '\n';
  }
  return kOk;
}

int run_estimate_z(double radius, double z, double alpha, long trials, std::uint64_t seed) {
  const nl::Window window = nl::Window::disk(nl::Point::Zero(), radius);
  const auto est = nl::estimate_partition(window, {}, alpha, z, trials, seed);
  std::cout << "estimate " << nl::format_double(est.estimate) << '\n'
            << "standard_error " << nl::format_double(est.standard_error) << '\n'
            << "accepted " << est.accepted << " of " << est.trials << '\n';
  if (radius < 0.5) {
    // No two points fit in a disk of diameter < 1, and a single point lacks its six neighbours.
    std::cout << "closed_form " << nl::format_double(std::exp(-z * window.area())) << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sampler and diagnostics for near-lattice point configurations"};
  app.require_subcommand(1);

  SpecFlags sample_flags;
  std::string sample_snapshot = "sample.snap";
  auto* sample = app.add_subcommand("sample", "Run one chain and save its final state");
  sample_flags.attach(*sample, false);
  sample->add_option("--snapshot", sample_snapshot, "where to write the final snapshot ('' to skip)");

  SpecFlags sweep_flags;
  bool quiet = false;
  auto* sweep = app.add_subcommand("sweep", "Run a (n, l) grid and write results.csv, manifest.json and snapshots");
  sweep_flags.attach(*sweep, true);
  sweep->add_flag("-q,--quiet", quiet, "no progress lines");

  std::string check_path;
  auto* check = app.add_subcommand("check", "Check admissibility of a snapshot");
  check->add_option("snapshot", check_path, "snapshot file")->required();

  std::string enum_path, enum_out;
  auto* enumerate = app.add_subcommand("enumerate", "Recover the lattice labeling of a planar snapshot as CSV");
  enumerate->add_option("snapshot", enum_path, "snapshot file")->required();
  enumerate->add_option("-o,--output", enum_out, "CSV file (default stdout)");

  double z_radius = 0.4, z_activity = 1.0, z_alpha = 0.15;
  long z_trials = 1000000;
  std::uint64_t z_seed = 1;
  auto* estimate = app.add_subcommand("estimate-z", "Monte Carlo partition function of an empty-boundary disk");
  estimate->add_option("--radius", z_radius, "disk radius")->capture_default_str();
  estimate->add_option("--z", z_activity, "activity")->capture_default_str();
  estimate->add_option("--alpha", z_alpha, "annulus width")->capture_default_str();
  estimate->add_option("--trials", z_trials, "Poisson draws")->capture_default_str();
  estimate->add_option("--seed", z_seed, "seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kSpec;
  }

  try {
    if (*sample) return run_sample(sample_flags, sample_snapshot);
    if (*sweep) return run_sweep(sweep_flags, quiet);
    if (*check) return run_check(check_path);
    if (*enumerate) return run_enumerate(enum_path, enum_out);
    if (*estimate) return run_estimate_z(z_radius, z_activity, z_alpha, z_trials, z_seed);
  } catch (const nl::Error& e) {
    std::cerr << e.what() << '\n';
    return e.code() == nl::ErrorCode::NotEnumerable ? kInvariant : kSpec;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSpec;
  }
  return kOk;
}
