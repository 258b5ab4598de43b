#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "nearlattice/configuration.hpp"

namespace nearlattice {

struct SamplerParams {
  std::uint64_t seed = 1;
  double proposal_radius = 0.0;  // <= 0 selects the automatic default
  bool auto_tune = true;         // adapt the radius during burn-in only
  long sweeps = 1000;            // production sweeps after burn-in
  long burn_in = 100;
  long thin = 10;
};

struct ChainStats {
  long sweeps_completed = 0;            // burn-in plus production
  long proposals = 0;                   // production phase
  long accepted = 0;
  double acceptance_rate = 0.0;
  std::vector<double> acceptance_by_class;  // per basis index
  std::array<long, 4> rejected_by{};        // Omega1..Omega4
  double proposal_radius = 0.0;             // frozen value used in production

  friend bool operator==(const ChainStats&, const ChainStats&) = default;
};

/// Called after every `thin`-th production sweep with the global sweep index.
using Observer = std::function<void(const Configuration&, long sweep)>;

struct ChainResult {
  Configuration final;
  ChainStats stats;
};

/// Default proposal radius 0.05 (1 + alpha - l).
double default_proposal_radius(double l, double alpha) noexcept;

/// Single-site Metropolis on the uniform measure over admissible
/// configurations. Throws INADMISSIBLE_START.
ChainResult metropolis_run(const Configuration& c0, const SamplerParams& params, const Observer& observer = {});

/// Independent uniform perturbation of every free site inside a ball of
/// radius r around l x. Throws RADIUS_TOO_LARGE unless 2r < min(l - 1, 1 + alpha - l) and r < 1/2.
Configuration ball_sample(std::shared_ptr<const Lattice> lattice, double l, double alpha, double r,
                          std::uint64_t seed);

/// Splittable seed stream: the index-th child of `master`.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;

/// Uniform point in the d-ball of the given radius.
Point uniform_in_ball(std::mt19937_64& rng, int dim, double radius);

}  // namespace nearlattice
