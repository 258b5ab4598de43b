#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nearlattice/lattice.hpp"
#include "nearlattice/observables.hpp"
#include "nearlattice/sampler.hpp"

namespace nearlattice {

/// Parameter grid for a batch of independent chains.
struct ExperimentSpec {
  LatticeKind lattice = LatticeKind::Triangular2D;
  std::vector<int> n_list;
  std::vector<double> l_list;
  std::optional<double> alpha;  // defaults per dimension
  std::uint64_t seed = 1;
  long sweeps = 1000;
  long burn_in = 100;
  long thin = 10;
  double proposal_radius = 0.0;  // 0 = auto
  bool auto_tune = true;
  std::vector<std::string> observables{"deviation", "directions", "volume"};
  bool write_cells = false;
  bool check_invariants = true;
  int workers = 0;  // 0 = hardware concurrency
  std::filesystem::path output_dir = ".";

  double effective_alpha() const;
  bool observes(std::string_view name) const;
  /// Throws SPEC_ERROR.
  void validate() const;
  /// Applies one key=value assignment; throws SPEC_ERROR on unknown keys or bad values.
  void set(std::string_view key, std::string_view value);
};

/// Reads flat key=value lines ('#' comments, list values comma separated) on top of `base`.
ExperimentSpec parse_spec(std::istream& in, ExperimentSpec base = {});
ExperimentSpec parse_spec_file(const std::filesystem::path& path, ExperimentSpec base = {});

/// Aggregate observables of one (n, l) chain.
struct GridPointResult {
  int n = 0;
  double l = 0.0;
  std::uint64_t seed = 0;
  ChainStats stats;
  long samples = 0;
  BatchMeans dev_id;
  BatchMeans dev_lid;
  BatchMeans psi6;
  BatchMeans ang_dev;
  BatchMeans edge_dev;
  double max_dev = 0.0;
  double max_abs_vol_residual = 0.0;
  double rigidity_ratio_max = 0.0;
  bool invariants_ok = true;
  std::string first_failure;
};

struct ExperimentResult {
  std::vector<GridPointResult> points;  // grid order: n outer, l inner
  bool invariants_ok = true;
  std::string first_failure;
};

/// Runs every grid point (in parallel), writing results.csv, optional
/// cells.csv, one snapshot per grid point and manifest.json into output_dir.
ExperimentResult run_experiment(const ExperimentSpec& spec, std::ostream* log = nullptr);

/// One chain with the experiment's observables, no file output.
GridPointResult run_grid_point(const ExperimentSpec& spec, int n, double l, std::uint64_t seed,
                               Configuration* final_state = nullptr);

inline constexpr std::string_view kResultsHeader =
    "lattice,n,l,alpha,sweep,acceptance,mean_dev_id,mean_dev_lid,max_dev,psi6,mean_ang_dev,vol_residual,edge_dev_sum";

}  // namespace nearlattice
