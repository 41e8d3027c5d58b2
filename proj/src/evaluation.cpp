#include "maxent/evaluation.hpp"

#include <cmath>

#include "maxent/entropy.hpp"
#include "maxent/error.hpp"

namespace maxent {
namespace {

void extend_by_sampling(const Cmp& cmp, const Policy& policy, int horizon, History& h, Rng& rng) {
  h.states.reserve(static_cast<std::size_t>(horizon));
  h.actions.reserve(static_cast<std::size_t>(horizon));
  while (h.states.size() < static_cast<std::size_t>(horizon)) {
    const auto dist = act(policy, {h.states, h.actions});
    const int a = sample_index(dist, rng);
    const int next = sample_index(cmp.row(h.last_state(), a), rng);
    h.actions.push_back(a);
    h.states.push_back(next);
  }
}

struct Enumerator {
  const Cmp& cmp;
  const Policy& policy;
  int horizon;
  const TrajectoryVisitor& visit;
  History h;

  void run(double prob) {
    if (h.states.size() == static_cast<std::size_t>(horizon)) {
      h.log_probability = std::log(prob);
      visit(h, prob);
      return;
    }
    const auto dist = act(policy, {h.states, h.actions});
    const int s = h.last_state();
    for (int a = 0; a < cmp.num_actions(); ++a) {
      const double pa = dist[static_cast<std::size_t>(a)];
      if (pa <= 0.0) continue;
      for (int n = 0; n < cmp.num_states(); ++n) {
        const double pn = cmp.p(s, a, n);
        if (pn <= 0.0) continue;
        h.actions.push_back(a);
        h.states.push_back(n);
        run(prob * pa * pn);
        h.actions.pop_back();
        h.states.pop_back();
      }
    }
  }
};

void check_enumeration_cap(const Cmp& cmp, int steps, double cap) {
  const double size = std::pow(cmp.num_actions(), steps) * std::pow(cmp.num_states(), steps + 1);
  if (size > cap)
    throw Error(ErrorKind::CapExceeded, "trajectory enumeration would exceed the cap", {{"estimated_histories", size}, {"cap", cap}});
}

}  // namespace

History sample_trajectory(const Cmp& cmp, const Policy& policy, const EpisodeSpec& spec, Rng& rng) {
  History h;
  h.states.push_back(sample_index(cmp.initial(), rng));
  extend_by_sampling(cmp, policy, spec.horizon, h, rng);
  return h;
}

History sample_continuation(const Cmp& cmp, const Policy& policy, const EpisodeSpec& spec, const History& prefix,
                            Rng& rng) {
  History h{prefix.states, prefix.actions, std::nullopt};
  extend_by_sampling(cmp, policy, spec.horizon, h, rng);
  return h;
}

void enumerate_trajectories(const Cmp& cmp, const Policy& policy, const EpisodeSpec& spec,
                            const TrajectoryVisitor& visit, double cap) {
  spec.validate();
  check_policy_fits(policy, cmp, spec);
  check_enumeration_cap(cmp, spec.horizon - 1, cap);
  Enumerator e{cmp, policy, spec.horizon, visit, {}};
  for (int s = 0; s < cmp.num_states(); ++s) {
    const double p0 = cmp.initial()[static_cast<std::size_t>(s)];
    if (p0 <= 0.0) continue;
    e.h.states.assign(1, s);
    e.h.actions.clear();
    e.run(p0);
  }
}

void enumerate_continuations(const Cmp& cmp, const Policy& policy, const EpisodeSpec& spec, const History& prefix,
                             const TrajectoryVisitor& visit, double cap) {
  spec.validate();
  check_policy_fits(policy, cmp, spec);
  check_history(cmp, prefix);
  if (prefix.states.size() > static_cast<std::size_t>(spec.horizon))
    throw Error(ErrorKind::InconsistentPrefix, "prefix is longer than the horizon");
  check_enumeration_cap(cmp, spec.horizon - static_cast<int>(prefix.states.size()), cap);
  Enumerator e{cmp, policy, spec.horizon, visit, {prefix.states, prefix.actions, std::nullopt}};
  e.run(1.0);
}

double expected_entropy_on_graph(const CountGraph& graph, const Policy& policy) {
  const auto& codec = graph.codec();
  std::vector<double> mass(graph.size(), 0.0);
  for (const auto& r : graph.roots()) mass[r.node] += r.mass;
  double value = 0.0;
  for (std::size_t i = 0; i < graph.size(); ++i) {
    const double m = mass[i];
    if (m == 0.0) continue;
    if (graph.terminal(i)) {
      value += m * codec.entropy(graph.key(i));
      continue;
    }
    const auto row = act_at_node(policy, codec, graph.key(i), graph.depth(i) - 1);
    for (int a = 0; a < graph.num_actions(); ++a) {
      const double w = m * row[static_cast<std::size_t>(a)];
      if (w == 0.0) continue;
      for (const auto& e : graph.edges(i, a)) mass[e.target] += w * e.prob;
    }
  }
  return value;
}

double exact_expected_entropy(const Cmp& cmp, const Policy& policy, const EpisodeSpec& spec, const ExactOptions& options) {
  spec.validate();
  check_policy_fits(policy, cmp, spec);
  if (policy.is_count_measurable()) {
    const auto graph = CountGraph::from_initial(cmp, spec.horizon, options.node_cap);
    return expected_entropy_on_graph(graph, policy);
  }
  double value = 0.0;
  enumerate_trajectories(
      cmp, policy, spec,
      [&](const History& h, double p) { value += p * count_entropy(VisitCounts::of(h, cmp.num_states(), spec.horizon).counts, spec.horizon); },
      options.enumeration_cap);
  return value;
}

double expected_continuation_entropy(const Cmp& cmp, const Policy& policy, const EpisodeSpec& spec,
                                     const History& prefix, const ExactOptions& options) {
  spec.validate();
  check_policy_fits(policy, cmp, spec);
  if (policy.is_count_measurable()) {
    const auto graph = CountGraph::from_prefix(cmp, spec.horizon, prefix, options.node_cap);
    return expected_entropy_on_graph(graph, policy);
  }
  double value = 0.0;
  enumerate_continuations(
      cmp, policy, spec, prefix,
      [&](const History& h, double p) { value += p * count_entropy(VisitCounts::of(h, cmp.num_states(), spec.horizon).counts, spec.horizon); },
      options.enumeration_cap);
  return value;
}

}  // namespace maxent
