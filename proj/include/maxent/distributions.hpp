#pragma once

#include <vector>

#include "maxent/cmp.hpp"
#include "maxent/policy.hpp"

namespace maxent {

/// d_0 = mu, d_t = d_{t-1} pushed through pi_{t-1} and P. Returns d_0..d_{T-1}.
/// Markov policies only (PolicyClassMismatch otherwise).
std::vector<StateDistribution> step_distributions(const Cmp& cmp, const Policy& policy, const EpisodeSpec& spec);

/// (1/T) sum_t d_t.
StateDistribution marginal_distribution(const Cmp& cmp, const Policy& policy, const EpisodeSpec& spec);

/// (1 - gamma) sum_t gamma^t d_t, truncated once the remaining geometric mass
/// drops below 1e-12. Needs spec.discount. A time-varying policy keeps using
/// its last decision rule after t = T-2.
StateDistribution discounted_distribution(const Cmp& cmp, const Policy& policy, const EpisodeSpec& spec);

struct StationaryOptions {
  int max_iterations = 1'000'000;
  double tolerance = 1e-10;
};

/// Cesaro-averaged power iteration of the chain induced by a stationary
/// policy, started from mu. Throws NoConvergence after max_iterations.
StateDistribution stationary_distribution(const Cmp& cmp, const Policy& policy, const StationaryOptions& options = {});

enum class InfiniteKind { Stationary, Discounted, Marginal };

/// Entropy of the requested asymptotic or marginal state distribution.
double infinite_sample_entropy(const Cmp& cmp, const Policy& policy, const EpisodeSpec& spec, InfiniteKind kind);

}  // namespace maxent
