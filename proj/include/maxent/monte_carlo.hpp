#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "maxent/cmp.hpp"
#include "maxent/policy.hpp"

namespace maxent {

enum class Execution { Serial, Parallel };

/// Per-episode results of `num_rollouts` seeded episodes. Episode i uses
/// stream_rng(seed, i), so both execution modes produce identical bits.
struct RolloutBatch {
  int num_states = 0;
  std::vector<double> entropies;        // H(d_h) per episode
  std::vector<double> visit_frequency;  // episode-major, num_states per episode
};

RolloutBatch rollout_batch(const Cmp& cmp, const Policy& policy, const EpisodeSpec& spec, std::size_t num_rollouts,
                           std::uint64_t seed, Execution execution = Execution::Parallel);

struct MeanCi {
  double mean = 0.0;
  double std_error = 0.0;
  double ci_halfwidth = 0.0;
};

/// Two-sided normal quantile z with P(|Z| <= z) = level.
double normal_two_sided_quantile(double level);

/// Sample mean with a normal-approximation CI (mean +- z s / sqrt(n)); values
/// are summed in index order.
MeanCi mean_ci(std::span<const double> values, double level = 0.95);

struct MonteCarloEstimate {
  double mean = 0.0;
  double ci_halfwidth = 0.0;
  double std_error = 0.0;
  std::size_t num_rollouts = 0;
};

/// Seeded Monte-Carlo estimate of E[H(d_h)] with a 95% CI half-width.
/// Requires num_rollouts >= 2.
MonteCarloEstimate monte_carlo_expected_entropy(const Cmp& cmp, const Policy& policy, const EpisodeSpec& spec,
                                                std::size_t num_rollouts, std::uint64_t seed,
                                                Execution execution = Execution::Parallel);

}  // namespace maxent
