#include "maxent/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include <boost/math/distributions/normal.hpp>

#include "maxent/entropy.hpp"
#include "maxent/error.hpp"
#include "maxent/evaluation.hpp"
#include "maxent/rng.hpp"

namespace maxent {
namespace {

void run_episode(const Cmp& cmp, const Policy& policy, const EpisodeSpec& spec, std::uint64_t seed, std::size_t i,
                 RolloutBatch& out) {
  auto rng = stream_rng(seed, i);
  const auto h = sample_trajectory(cmp, policy, spec, rng);
  const auto S = static_cast<std::size_t>(cmp.num_states());
  double* freq = out.visit_frequency.data() + i * S;
  std::vector<int> counts(S, 0);
  for (int s : h.states) ++counts[static_cast<std::size_t>(s)];
  for (std::size_t s = 0; s < S; ++s) freq[s] = static_cast<double>(counts[s]) / spec.horizon;
  out.entropies[i] = count_entropy(counts, spec.horizon);
}

// Serial reference kernel.
void rollouts_serial(const Cmp& cmp, const Policy& policy, const EpisodeSpec& spec, std::uint64_t seed,
                     RolloutBatch& out) {
  for (std::size_t i = 0; i < out.entropies.size(); ++i) run_episode(cmp, policy, spec, seed, i, out);
}

void rollouts_parallel(const Cmp& cmp, const Policy& policy, const EpisodeSpec& spec, std::uint64_t seed,
                       RolloutBatch& out) {
  const auto n = static_cast<std::int64_t>(out.entropies.size());
  std::exception_ptr failure;
#if defined(MAXENT_HAVE_OPENMP)
#pragma omp parallel for schedule(static)
#endif
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      run_episode(cmp, policy, spec, seed, static_cast<std::size_t>(i), out);
    } catch (...) {
#if defined(MAXENT_HAVE_OPENMP)
#pragma omp critical(maxent_rollout_failure)
#endif
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

RolloutBatch rollout_batch(const Cmp& cmp, const Policy& policy, const EpisodeSpec& spec, std::size_t num_rollouts,
                           std::uint64_t seed, Execution execution) {
  spec.validate();
  check_policy_fits(policy, cmp, spec);
  RolloutBatch out;
  out.num_states = cmp.num_states();
  out.entropies.assign(num_rollouts, 0.0);
  out.visit_frequency.assign(num_rollouts * static_cast<std::size_t>(cmp.num_states()), 0.0);
  if (execution == Execution::Serial)
    rollouts_serial(cmp, policy, spec, seed, out);
  else
    rollouts_parallel(cmp, policy, spec, seed, out);
  return out;
}

double normal_two_sided_quantile(double level) {
  if (!(level > 0.0 && level < 1.0)) throw Error(ErrorKind::InvalidArgument, "confidence level must lie in (0,1)", {{"level", level}});
  return boost::math::quantile(boost::math::normal_distribution<double>(), 0.5 + level / 2.0);
}

MeanCi mean_ci(std::span<const double> values, double level) {
  MeanCi r;
  if (values.empty()) return r;
  double sum = 0.0;
  for (double v : values) sum += v;
  r.mean = sum / static_cast<double>(values.size());
  if (std::all_of(values.begin(), values.end(), [&](double v) { return v == values.front(); })) {
    r.mean = values.front();
    return r;
  }
  double ss = 0.0;
  for (double v : values) ss += (v - r.mean) * (v - r.mean);
  const double sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  r.std_error = sd / std::sqrt(static_cast<double>(values.size()));
  r.ci_halfwidth = normal_two_sided_quantile(level) * r.std_error;
  return r;
}

MonteCarloEstimate monte_carlo_expected_entropy(const Cmp& cmp, const Policy& policy, const EpisodeSpec& spec,
                                                std::size_t num_rollouts, std::uint64_t seed, Execution execution) {
  if (num_rollouts < 2) throw Error(ErrorKind::InvalidArgument, "need at least two rollouts", {{"num_rollouts", num_rollouts}});
  const auto batch = rollout_batch(cmp, policy, spec, num_rollouts, seed, execution);
  const auto stats = mean_ci(batch.entropies, 0.95);
  return {stats.mean, stats.ci_halfwidth, stats.std_error, num_rollouts};
}

}  // namespace maxent
