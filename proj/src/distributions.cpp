#include "maxent/distributions.hpp"

#include <algorithm>
#include <cmath>

#include "maxent/entropy.hpp"
#include "maxent/error.hpp"

namespace maxent {
namespace {

void require_markov(const Policy& policy) {
  if (!policy.is_markov())
    throw Error(ErrorKind::PolicyClassMismatch,
                "step distributions of history-dependent policies need trajectory enumeration",
                {{"kind", std::string(to_string(policy.kind()))}});
}

std::span<const double> markov_row(const Policy& policy, int t, int s) {
  if (const auto* p = policy.get_if<MarkovStationaryPolicy>()) return p->row(s);
  const auto& tv = *policy.get_if<MarkovTimeVaryingPolicy>();
  return tv.row(std::min(t, tv.horizon() - 2), s);
}

std::vector<double> push(const Cmp& cmp, const Policy& policy, int t, const std::vector<double>& d) {
  const int S = cmp.num_states();
  std::vector<double> next(static_cast<std::size_t>(S), 0.0);
  for (int s = 0; s < S; ++s) {
    const double mass = d[static_cast<std::size_t>(s)];
    if (mass == 0.0) continue;
    const auto pi = markov_row(policy, t, s);
    for (int a = 0; a < cmp.num_actions(); ++a) {
      const double w = mass * pi[static_cast<std::size_t>(a)];
      if (w == 0.0) continue;
      const auto row = cmp.row(s, a);
      for (int n = 0; n < S; ++n) next[static_cast<std::size_t>(n)] += w * row[static_cast<std::size_t>(n)];
    }
  }
  return next;
}

}  // namespace

std::vector<StateDistribution> step_distributions(const Cmp& cmp, const Policy& policy, const EpisodeSpec& spec) {
  spec.validate();
  require_markov(policy);
  check_policy_fits(policy, cmp, spec);
  std::vector<StateDistribution> out;
  out.reserve(static_cast<std::size_t>(spec.horizon));
  std::vector<double> d(cmp.initial().begin(), cmp.initial().end());
  for (int t = 0; t < spec.horizon; ++t) {
    out.push_back({d, DistributionKind::Step});
    if (t + 1 < spec.horizon) d = push(cmp, policy, t, d);
  }
  return out;
}

StateDistribution marginal_distribution(const Cmp& cmp, const Policy& policy, const EpisodeSpec& spec) {
  const auto steps = step_distributions(cmp, policy, spec);
  StateDistribution m{std::vector<double>(static_cast<std::size_t>(cmp.num_states()), 0.0), DistributionKind::Marginal};
  for (const auto& d : steps)
    for (std::size_t s = 0; s < m.probabilities.size(); ++s) m.probabilities[s] += d.probabilities[s];
  for (double& p : m.probabilities) p /= spec.horizon;
  return m;
}

StateDistribution discounted_distribution(const Cmp& cmp, const Policy& policy, const EpisodeSpec& spec) {
  spec.validate();
  require_markov(policy);
  if (!spec.discount) throw Error(ErrorKind::InvalidArgument, "discounted distribution needs a discount factor");
  const double gamma = *spec.discount;
  StateDistribution out{std::vector<double>(static_cast<std::size_t>(cmp.num_states()), 0.0), DistributionKind::Discounted};
  std::vector<double> d(cmp.initial().begin(), cmp.initial().end());
  double weight = 1.0 - gamma;
  double residual = 1.0;  // geometric mass not yet added
  for (int t = 0; residual >= 1e-12; ++t) {
    for (std::size_t s = 0; s < d.size(); ++s) out.probabilities[s] += weight * d[s];
    residual -= weight;
    weight *= gamma;
    d = push(cmp, policy, t, d);
  }
  // Renormalize the truncated tail away.
  double sum = 0.0;
  for (double p : out.probabilities) sum += p;
  for (double& p : out.probabilities) p /= sum;
  return out;
}

StateDistribution stationary_distribution(const Cmp& cmp, const Policy& policy, const StationaryOptions& options) {
  if (policy.kind() != PolicyKind::MarkovStationary)
    throw Error(ErrorKind::PolicyClassMismatch, "stationary distribution needs a stationary policy",
                {{"kind", std::string(to_string(policy.kind()))}});
  // Averaging is done with the lazy chain (I + P_pi) / 2: its iterates are
  // binomially weighted averages of P_pi^k, share the Cesaro limit of P_pi,
  // and converge geometrically even when P_pi is periodic.
  const auto S = static_cast<std::size_t>(cmp.num_states());
  std::vector<double> d(cmp.initial().begin(), cmp.initial().end());
  for (int n = 1; n <= options.max_iterations; ++n) {
    auto next = push(cmp, policy, 0, d);
    double delta = 0.0;
    for (std::size_t s = 0; s < S; ++s) {
      next[s] = 0.5 * (next[s] + d[s]);
      delta = std::max(delta, std::abs(next[s] - d[s]));
    }
    d = std::move(next);
    if (delta < options.tolerance) return {d, DistributionKind::Stationary};
  }
  throw Error(ErrorKind::NoConvergence, "stationary distribution did not converge", {{"iterations", options.max_iterations}});
}

double infinite_sample_entropy(const Cmp& cmp, const Policy& policy, const EpisodeSpec& spec, InfiniteKind kind) {
  switch (kind) {
    case InfiniteKind::Stationary: return entropy(stationary_distribution(cmp, policy).probabilities);
    case InfiniteKind::Discounted: return entropy(discounted_distribution(cmp, policy, spec).probabilities);
    case InfiniteKind::Marginal: return entropy(marginal_distribution(cmp, policy, spec).probabilities);
  }
  return 0.0;
}

}  // namespace maxent
