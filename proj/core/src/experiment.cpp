#include "nearlattice/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <fstream>
#include <istream>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include <nlohmann/json.hpp>

#include "nearlattice/error.hpp"
#include "nearlattice/geometry.hpp"
#include "nearlattice/hamiltonian.hpp"
#include "nearlattice/snapshot.hpp"

#ifndef NEARLATTICE_VERSION
#define NEARLATTICE_VERSION "unknown"
#endif

namespace nearlattice {

namespace {

constexpr double kVolumeResidualTol = 1e-9;
constexpr double kMeanJacobianTol = 1e-10;
const std::vector<std::string> kKnownObservables{"deviation", "directions", "volume"};

[[noreturn]] void spec_fail(const std::string& what) { throw Error(ErrorCode::SpecError, what); }

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_list(std::string_view value) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = value.find(',');
    const auto item = trim(value.substr(0, comma));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string_view::npos) break;
    value.remove_prefix(comma + 1);
  }
  return out;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  std::replace(out.begin(), out.end(), '-', '_');
  return out;
}

double to_double(std::string_view key, std::string_view value) {
  try {
    return parse_double(value);
  } catch (const Error&) {
    spec_fail("bad number for " + std::string(key) + ": '" + std::string(value) + "'");
  }
}

long to_long(std::string_view key, std::string_view value) {
  const double v = to_double(key, value);
  if (v != std::floor(v) || std::abs(v) > 9e15) spec_fail(std::string(key) + " must be an integer");
  return static_cast<long>(v);
}

bool to_bool(std::string_view key, std::string_view value) {
  const auto v = lower(value);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  spec_fail("bad boolean for " + std::string(key) + ": '" + std::string(value) + "'");
}

std::string timestamp(std::chrono::system_clock::time_point t) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string short_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

nlohmann::json batch_json(const BatchMeans& b) {
  return {{"mean", b.mean}, {"standard_error", b.standard_error}, {"batches", b.batches}};
}

}  // namespace

double ExperimentSpec::effective_alpha() const { return alpha.value_or(default_alpha(dimension_of(lattice))); }

bool ExperimentSpec::observes(std::string_view name) const {
  return std::find(observables.begin(), observables.end(), name) != observables.end();
}

void ExperimentSpec::set(std::string_view raw_key, std::string_view raw_value) {
  const std::string key = lower(trim(raw_key));
  const std::string_view value = trim(raw_value);
  if (value.empty()) spec_fail("empty value for " + key);
  if (key == "lattice") {
    try {
      lattice = parse_lattice_kind(value);
    } catch (const Error& e) {
      spec_fail(e.what());
    }
  } else if (key == "n" || key == "n_list") {
    n_list.clear();
    for (auto item : split_list(value)) n_list.push_back(static_cast<int>(to_long(key, item)));
  } else if (key == "l" || key == "l_list") {
    l_list.clear();
    for (auto item : split_list(value)) l_list.push_back(to_double(key, item));
  } else if (key == "alpha") {
    alpha = to_double(key, value);
  } else if (key == "seed") {
    const long v = to_long(key, value);
    if (v < 0) spec_fail("seed must be non-negative");
    seed = static_cast<std::uint64_t>(v);
  } else if (key == "sweeps") {
    sweeps = to_long(key, value);
  } else if (key == "burn_in") {
    burn_in = to_long(key, value);
  } else if (key == "thin") {
    thin = to_long(key, value);
  } else if (key == "proposal_radius" || key == "delta") {
    proposal_radius = lower(value) == "auto" ? 0.0 : to_double(key, value);
  } else if (key == "auto_tune") {
    auto_tune = to_bool(key, value);
  } else if (key == "observables") {
    observables.clear();
    for (auto item : split_list(value)) {
      const auto name = lower(item);
      if (name == "cells") {
        write_cells = true;
        continue;
      }
      if (std::find(kKnownObservables.begin(), kKnownObservables.end(), name) == kKnownObservables.end()) {
        spec_fail("unknown observable '" + name + "'");
      }
      observables.push_back(name);
    }
  } else if (key == "cells" || key == "write_cells") {
    write_cells = to_bool(key, value);
  } else if (key == "check_invariants") {
    check_invariants = to_bool(key, value);
  } else if (key == "workers") {
    workers = static_cast<int>(to_long(key, value));
  } else if (key == "output_dir" || key == "output" || key == "out") {
    output_dir = std::string(value);
  } else {
    spec_fail("unknown key '" + key + "'");
  }
}

void ExperimentSpec::validate() const {
  if (n_list.empty()) spec_fail("n list is empty");
  if (l_list.empty()) spec_fail("l list is empty");
  const double a = effective_alpha();
  if (!(a > 0.0 && a <= 1.0)) spec_fail("alpha must lie in (0, 1]");
  for (int n : n_list) {
    if (n < 1) spec_fail("every n must be >= 1");
  }
  for (double l : l_list) {
    if (!(l > 1.0 && l < 1.0 + a)) spec_fail("every l must lie in (1, 1 + alpha), got " + short_number(l));
  }
  if (sweeps < 0 || burn_in < 0) spec_fail("sweep counts must be >= 0");
  if (thin < 1) spec_fail("thin must be >= 1");
  if (!(proposal_radius >= 0.0) || !std::isfinite(proposal_radius)) spec_fail("proposal radius must be >= 0 or auto");
  if (workers < 0) spec_fail("workers must be >= 0");
}

ExperimentSpec parse_spec(std::istream& in, ExperimentSpec base) {
  std::string line;
  long number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) spec_fail("line " + std::to_string(number) + ": expected key = value");
    try {
      base.set(view.substr(0, eq), view.substr(eq + 1));
    } catch (const Error& e) {
      spec_fail("line " + std::to_string(number) + ": " + e.what());
    }
  }
  return base;
}

ExperimentSpec parse_spec_file(const std::filesystem::path& path, ExperimentSpec base) {
  std::ifstream in(path);
  if (!in) spec_fail("cannot open spec file " + path.string());
  return parse_spec(in, std::move(base));
}

GridPointResult run_grid_point(const ExperimentSpec& spec, int n, double l, std::uint64_t seed,
                               Configuration* final_state) {
  const double alpha = spec.effective_alpha();
  auto lattice = std::make_shared<const Lattice>(Lattice::build(spec.lattice, n));
  const Configuration c0 = scaled_lattice_config(lattice, l, alpha);
  const int d = lattice->dim();
  const double volume = lattice->period_cell_volume();
  const bool directions = d == 2 && spec.observes("directions");

  GridPointResult out;
  out.n = n;
  out.l = l;
  out.seed = seed;
  std::vector<double> dev_id, dev_lid, edge_dev, psi6, ang_dev;

  auto fail = [&](const std::string& what, long sweep) {
    if (out.invariants_ok) {
      out.invariants_ok = false;
      out.first_failure = what + " at sweep " + std::to_string(sweep);
    }
  };

  SamplerParams params;
  params.seed = seed;
  params.proposal_radius = spec.proposal_radius;
  params.auto_tune = spec.auto_tune;
  params.sweeps = spec.sweeps;
  params.burn_in = spec.burn_in;
  params.thin = spec.thin;

  auto observer = [&](const Configuration& c, long sweep) {
    ++out.samples;
    if (spec.observes("deviation") || spec.check_invariants) {
      const DeviationStats st = deviation_statistics(c);
      dev_id.push_back(st.mean_dev_id);
      dev_lid.push_back(st.mean_dev_lid);
      edge_dev.push_back(st.edge_dev_sum);
      out.max_dev = std::max(out.max_dev, st.max_dev_id);
      out.rigidity_ratio_max = std::max(out.rigidity_ratio_max, st.rigidity_ratio());
      if (spec.check_invariants) {
        const SquareMatrix target = l * SquareMatrix::Identity(d, d);
        if ((st.mean_jacobian - target).cwiseAbs().maxCoeff() > kMeanJacobianTol) fail("mean Jacobian identity", sweep);
      }
    }
    if (spec.observes("volume") || spec.check_invariants) {
      const double r = volume_sum_check(c);
      out.max_abs_vol_residual = std::max(out.max_abs_vol_residual, std::abs(r));
      if (spec.check_invariants && std::abs(r) > kVolumeResidualTol * volume) fail("volume-sum identity", sweep);
    }
    if (directions) {
      try {
        const DirectionStats ds = neighbor_direction_stats(c);
        psi6.push_back(ds.psi6);
        ang_dev.push_back(ds.mean_abs_deviation);
      } catch (const Error& e) {
        fail(std::string("six-neighbour condition: ") + e.what(), sweep);
      }
    }
    if (spec.check_invariants) {
      const auto report = check_admissibility(c);
      if (!report.overall()) fail("admissibility " + report.first_failure(), sweep);
      if (d == 2 && !hamiltonian_zero(c.point_set()).zero) fail("zero Hamiltonian", sweep);
    }
  };

  ChainResult chain = metropolis_run(c0, params, observer);
  out.stats = chain.stats;
  out.dev_id = batch_means(dev_id);
  out.dev_lid = batch_means(dev_lid);
  out.edge_dev = batch_means(edge_dev);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (directions) {
    out.psi6 = batch_means(psi6);
    out.ang_dev = batch_means(ang_dev);
  } else {
    out.psi6.mean = out.psi6.standard_error = nan;
    out.ang_dev.mean = out.ang_dev.standard_error = nan;
  }
  if (!spec.observes("deviation")) {
    out.dev_id.mean = out.dev_lid.mean = out.edge_dev.mean = out.max_dev = nan;
  }
  if (!spec.observes("volume")) out.max_abs_vol_residual = nan;
  if (final_state) *final_state = chain.final;
  return out;
}

ExperimentResult run_experiment(const ExperimentSpec& spec, std::ostream* log) {
  spec.validate();
  const auto started = std::chrono::system_clock::now();
  const auto t0 = std::chrono::steady_clock::now();
  std::filesystem::create_directories(spec.output_dir);

  struct Task {
    int n;
    double l;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (int n : spec.n_list) {
    for (double l : spec.l_list) {
      tasks.push_back(Task{n, l, derive_seed(spec.seed, tasks.size())});
    }
  }

  std::vector<GridPointResult> results(tasks.size());
  std::vector<std::optional<Configuration>> finals(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t pool = std::min<std::size_t>(tasks.size(), spec.workers > 0 ? std::size_t(spec.workers) : hw);

  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      try {
        Configuration final_state = scaled_lattice_config(
            std::make_shared<const Lattice>(Lattice::build(spec.lattice, tasks[i].n)), tasks[i].l, spec.effective_alpha());
        results[i] = run_grid_point(spec, tasks[i].n, tasks[i].l, tasks[i].seed, &final_state);
        finals[i] = std::move(final_state);
        if (log) {
          std::lock_guard lock(log_mutex);
          *log << "n=" << tasks[i].n << " l=" << short_number(tasks[i].l)
               << " acceptance=" << short_number(results[i].stats.acceptance_rate)
               << " mean_dev_id=" << short_number(results[i].dev_id.mean) << '\n';
        }
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> threads;
  for (std::size_t t = 1; t < pool; ++t) threads.emplace_back(worker);
  worker();
  for (auto& th : threads) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  ExperimentResult out;
  out.points = results;
  for (const auto& r : results) {
    if (!r.invariants_ok && out.invariants_ok) {
      out.invariants_ok = false;
      out.first_failure = "n=" + std::to_string(r.n) + " l=" + short_number(r.l) + ": " + r.first_failure;
    }
  }

  const double alpha = spec.effective_alpha();
  {
    std::ofstream csv(spec.output_dir / "results.csv");
    if (!csv) spec_fail("cannot write results.csv in " + spec.output_dir.string());
    csv << kResultsHeader << '\n';
    for (const auto& r : results) {
      csv << to_string(spec.lattice) << ',' << r.n << ',' << format_double(r.l) << ',' << format_double(alpha) << ','
          << r.stats.sweeps_completed << ',' << format_double(r.stats.acceptance_rate) << ','
          << format_double(r.dev_id.mean) << ',' << format_double(r.dev_lid.mean) << ',' << format_double(r.max_dev)
          << ',' << format_double(r.psi6.mean) << ',' << format_double(r.ang_dev.mean) << ','
          << format_double(r.max_abs_vol_residual) << ',' << format_double(r.edge_dev.mean) << '\n';
    }
  }

  if (spec.write_cells) {
    std::ofstream csv(spec.output_dir / "cells.csv");
    csv << "n,l,simplex,cell,kind,reference_volume,image_volume,dev_id,dev_lid,dist_so\n";
    for (std::size_t i = 0; i < results.size(); ++i) {
      const Configuration& c = *finals[i];
      const DeviationStats st = deviation_statistics(c);
      const auto simplices = c.lattice().triangulation();
      for (std::size_t s = 0; s < simplices.size(); ++s) {
        const Simplex& sx = simplices[s];
        std::array<Point, 4> img;
        for (std::size_t k = 0; k < static_cast<std::size_t>(sx.vertex_count); ++k) img[k] = c.image(sx.vertices[k]);
        const double vol = simplex_volume(std::span<const Point>(img.data(), static_cast<std::size_t>(sx.vertex_count)), c.dim());
        const CellKind kind = c.lattice().cells()[static_cast<std::size_t>(sx.cell)].kind;
        const char* kind_name = kind == CellKind::Triangle ? "triangle" : kind == CellKind::Tetra ? "tetra" : "octa";
        csv << results[i].n << ',' << format_double(results[i].l) << ',' << s << ',' << sx.cell << ',' << kind_name
            << ',' << format_double(sx.reference_volume) << ',' << format_double(vol) << ','
            << format_double(st.dev_id[s]) << ',' << format_double(st.dev_lid[s]) << ','
            << format_double(st.dist_so[s]) << '\n';
      }
    }
  }

  nlohmann::json grid = nlohmann::json::array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    const std::string snap = "n" + std::to_string(r.n) + "_l" + short_number(r.l) + ".snap";
    save_snapshot(spec.output_dir / snap, *finals[i], r.seed, r.stats.sweeps_completed);
    auto safe = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
    grid.push_back({{"n", r.n},
                    {"l", r.l},
                    {"seed", r.seed},
                    {"snapshot", snap},
                    {"sweeps", r.stats.sweeps_completed},
                    {"samples", r.samples},
                    {"acceptance", r.stats.acceptance_rate},
                    {"acceptance_by_class", r.stats.acceptance_by_class},
                    {"proposal_radius", r.stats.proposal_radius},
                    {"rejected_by", {{"omega1", r.stats.rejected_by[0]},
                                     {"omega2", r.stats.rejected_by[1]},
                                     {"omega3", r.stats.rejected_by[2]},
                                     {"omega4", r.stats.rejected_by[3]}}},
                    {"mean_dev_id", batch_json(r.dev_id)},
                    {"mean_dev_lid", batch_json(r.dev_lid)},
                    {"edge_dev_sum", batch_json(r.edge_dev)},
                    {"psi6", {{"mean", safe(r.psi6.mean)}, {"standard_error", safe(r.psi6.standard_error)}}},
                    {"mean_ang_dev", {{"mean", safe(r.ang_dev.mean)}, {"standard_error", safe(r.ang_dev.standard_error)}}},
                    {"max_dev", safe(r.max_dev)},
                    {"max_abs_vol_residual", safe(r.max_abs_vol_residual)},
                    {"rigidity_ratio_max", safe(r.rigidity_ratio_max)},
                    {"invariants_ok", r.invariants_ok},
                    {"first_failure", r.first_failure}});
  }
  const auto finished = std::chrono::system_clock::now();
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  nlohmann::json spec_json = {{"lattice", std::string(to_string(spec.lattice))},
                              {"n", spec.n_list},
                              {"l", spec.l_list},
                              {"alpha", alpha},
                              {"seed", spec.seed},
                              {"sweeps", spec.sweeps},
                              {"burn_in", spec.burn_in},
                              {"thin", spec.thin},
                              {"proposal_radius", spec.proposal_radius > 0 ? nlohmann::json(spec.proposal_radius) : nlohmann::json("auto")},
                              {"auto_tune", spec.auto_tune},
                              {"observables", spec.observables},
                              {"write_cells", spec.write_cells},
                              {"check_invariants", spec.check_invariants},
                              {"workers", pool}};
  nlohmann::json manifest = {{"tool", "nearlattice"},
                             {"version", NEARLATTICE_VERSION},
                             {"spec", spec_json},
                             {"grid", grid},
                             {"invariants_ok", out.invariants_ok},
                             {"first_failure", out.first_failure},
                             {"started_at", timestamp(started)},
                             {"finished_at", timestamp(finished)},
                             {"wall_clock_seconds", wall}};
  std::ofstream(spec.output_dir / "manifest.json") << manifest.dump(2) << '\n';
  return out;
}

}  // namespace nearlattice
