#include "nearlattice/gibbs.hpp"

#include <cmath>
#include <random>

#include "nearlattice/error.hpp"

namespace nearlattice {

namespace {

std::vector<Point> poisson_draw(const Window& window, double z, std::mt19937_64& rng) {
  std::vector<Point> points;
  if (z <= 0.0) return points;
  std::poisson_distribution<long> count(z * window.area());
  const long k = count(rng);
  points.reserve(static_cast<std::size_t>(k));
  for (long i = 0; i < k; ++i) points.push_back(window.sample(rng));
  return points;
}

void validate(double alpha, double z) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1]");
  if (!(z >= 0.0) || !std::isfinite(z)) throw Error(ErrorCode::InvalidArgument, "intensity must be >= 0");
}

}  // namespace

std::vector<Point> gibbs_kernel_sample(const Window& window, std::span<const Point> y, double alpha, double z,
                                       std::uint64_t seed, long max_trials) {
  validate(alpha, z);
  if (max_trials < 1) throw Error(ErrorCode::InvalidArgument, "max_trials must be >= 1");
  std::mt19937_64 rng(seed);
  for (long trial = 0; trial < max_trials; ++trial) {
    auto x = poisson_draw(window, z, rng);
    if (hamiltonian_window(window, x, y, alpha).zero) return x;
  }
  throw Error(ErrorCode::TrialsExhausted, "no zero-energy draw in " + std::to_string(max_trials) + " trials");
}

PartitionEstimate estimate_partition(const Window& window, std::span<const Point> y, double alpha, double z,
                                     long trials, std::uint64_t seed) {
  validate(alpha, z);
  if (trials < 1) throw Error(ErrorCode::InvalidArgument, "trials must be >= 1");
  std::mt19937_64 rng(seed);
  PartitionEstimate est;
  est.trials = trials;
  for (long t = 0; t < trials; ++t) {
    const auto x = poisson_draw(window, z, rng);
    if (hamiltonian_window(window, x, y, alpha).zero) ++est.accepted;
  }
  est.estimate = double(est.accepted) / double(trials);
  est.standard_error = std::sqrt(est.estimate * (1.0 - est.estimate) / double(trials));
  return est;
}

}  // namespace nearlattice
