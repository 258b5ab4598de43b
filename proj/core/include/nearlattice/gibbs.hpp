#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nearlattice/hamiltonian.hpp"

namespace nearlattice {

/// Poisson rejection sampler for the Gibbs kernel of a window given the
/// boundary Y. Throws TRIALS_EXHAUSTED after max_trials rejected draws.
std::vector<Point> gibbs_kernel_sample(const Window& window, std::span<const Point> y, double alpha, double z,
                                       std::uint64_t seed, long max_trials);

struct PartitionEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
  long accepted = 0;
  long trials = 0;
};

/// Acceptance fraction of Poisson draws with H = 0, with binomial standard error.
PartitionEstimate estimate_partition(const Window& window, std::span<const Point> y, double alpha, double z,
                                     long trials, std::uint64_t seed);

}  // namespace nearlattice
