#include "nearlattice/sampler.hpp"

#include <algorithm>
#include <cmath>

#include "nearlattice/admissibility.hpp"
#include "nearlattice/error.hpp"

namespace nearlattice {

namespace {

constexpr double kTargetAcceptance = 0.3;
constexpr long kTuneWindow = 10;
constexpr double kMinRadius = 1e-9;
constexpr double kMaxRadius = 1.0;

}  // namespace

double default_proposal_radius(double l, double alpha) noexcept { return 0.05 * (1.0 + alpha - l); }

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Point uniform_in_ball(std::mt19937_64& rng, int dim, double radius) {
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  while (true) {
    Point p(sym(rng), sym(rng), dim == 3 ? sym(rng) : 0.0);
    if (p.squaredNorm() < 1.0) return radius * p;
  }
}

ChainResult metropolis_run(const Configuration& c0, const SamplerParams& params, const Observer& observer) {
  if (params.thin < 1) throw Error(ErrorCode::InvalidArgument, "thin must be >= 1");
  if (params.sweeps < 0 || params.burn_in < 0) throw Error(ErrorCode::InvalidArgument, "sweep counts must be >= 0");
  if (!std::isfinite(params.proposal_radius)) throw Error(ErrorCode::InvalidArgument, "proposal radius must be finite");

  const auto start = check_admissibility(c0);
  if (!start.overall()) {
    throw Error(ErrorCode::InadmissibleStart, "initial configuration fails " + start.first_failure());
  }

  ChainResult result{c0, ChainStats{}};
  Configuration& c = result.final;
  ChainStats& stats = result.stats;
  const LocalChecker checker(c);
  const int dim = c.dim();
  const int sites = c.lattice().site_count();
  const int classes = c.lattice().basis_size();

  std::mt19937_64 rng(params.seed);
  double radius = params.proposal_radius > 0 ? params.proposal_radius : default_proposal_radius(c.l(), c.alpha());

  std::vector<long> class_proposals(static_cast<std::size_t>(classes), 0);
  std::vector<long> class_accepted(static_cast<std::size_t>(classes), 0);
  long window_proposals = 0;
  long window_accepted = 0;

  const long total = params.burn_in + params.sweeps;
  for (long sweep = 1; sweep <= total; ++sweep) {
    const bool production = sweep > params.burn_in;
    for (int site = 1; site < sites; ++site) {
      const Point proposal = c.position(site) + uniform_in_ball(rng, dim, radius);
      const MoveVerdict verdict = checker.check_move(c, site, proposal);
      const bool accept = verdict == MoveVerdict::Accept;
      if (accept) c.set_position(site, proposal);
      if (production) {
        const auto cls = static_cast<std::size_t>(c.lattice().sites()[static_cast<std::size_t>(site)].basis);
        ++stats.proposals;
        ++class_proposals[cls];
        if (accept) {
          ++stats.accepted;
          ++class_accepted[cls];
        } else {
          ++stats.rejected_by[static_cast<std::size_t>(verdict) - 1];
        }
      } else {
        ++window_proposals;
        if (accept) ++window_accepted;
      }
    }
    if (!production && params.auto_tune && sweep % kTuneWindow == 0 && window_proposals > 0) {
      const double rate = double(window_accepted) / double(window_proposals);
      radius = std::clamp(radius * std::exp(rate - kTargetAcceptance), kMinRadius, kMaxRadius);
      window_proposals = 0;
      window_accepted = 0;
    }
    stats.sweeps_completed = sweep;
    if (production && (sweep - params.burn_in) % params.thin == 0 && observer) observer(c, sweep);
  }

  stats.proposal_radius = radius;
  stats.acceptance_rate = stats.proposals > 0 ? double(stats.accepted) / double(stats.proposals) : 0.0;
  stats.acceptance_by_class.resize(static_cast<std::size_t>(classes), 0.0);
  for (std::size_t k = 0; k < stats.acceptance_by_class.size(); ++k) {
    if (class_proposals[k] > 0) stats.acceptance_by_class[k] = double(class_accepted[k]) / double(class_proposals[k]);
  }
  return result;
}

Configuration ball_sample(std::shared_ptr<const Lattice> lattice, double l, double alpha, double r,
                          std::uint64_t seed) {
  if (!lattice) throw Error(ErrorCode::InvalidArgument, "ball sampler needs a lattice");
  if (!(l > 1.0 && l < 1.0 + alpha)) {
    throw Error(ErrorCode::ScaleOutOfRange, "l must lie in the open interval (1, 1 + alpha)");
  }
  if (!(r >= 0.0)) throw Error(ErrorCode::InvalidArgument, "radius must be non-negative");
  if (!(2 * r < std::min(l - 1.0, 1.0 + alpha - l)) || !(r < 0.5)) {
    throw Error(ErrorCode::RadiusTooLarge, "need 2r < min(l - 1, 1 + alpha - l) and r < 1/2");
  }
  std::mt19937_64 rng(seed);
  const int dim = lattice->dim();
  std::vector<Point> positions;
  positions.reserve(lattice->sites().size());
  for (const auto& s : lattice->sites()) {
    if (positions.empty()) {
      positions.push_back(Point::Zero());
      continue;
    }
    positions.push_back(l * s.position + uniform_in_ball(rng, dim, r));
  }
  return Configuration(std::move(lattice), std::move(positions), l, alpha);
}

}  // namespace nearlattice
