#include "maxent/markovianize.hpp"

#include "maxent/count_graph.hpp"

namespace maxent {

std::vector<std::vector<double>> state_action_occupancy(const Cmp& cmp, const Policy& policy, const EpisodeSpec& spec,
                                                        const ExactOptions& options) {
  spec.validate();
  check_policy_fits(policy, cmp, spec);
  const int S = cmp.num_states();
  const int A = cmp.num_actions();
  const auto cell = [A](int s, int a) { return static_cast<std::size_t>(s) * A + static_cast<std::size_t>(a); };
  std::vector<std::vector<double>> joint(static_cast<std::size_t>(spec.horizon > 1 ? spec.horizon - 1 : 0),
                                         std::vector<double>(static_cast<std::size_t>(S) * A, 0.0));

  if (policy.is_count_measurable()) {
    const auto graph = CountGraph::from_initial(cmp, spec.horizon, options.node_cap);
    std::vector<double> mass(graph.size(), 0.0);
    for (const auto& r : graph.roots()) mass[r.node] += r.mass;
    for (std::size_t i = 0; i < graph.size(); ++i) {
      if (graph.terminal(i) || mass[i] == 0.0) continue;
      const int t = graph.depth(i) - 1;
      const int s = graph.state(i);
      const auto row = act_at_node(policy, graph.codec(), graph.key(i), t);
      for (int a = 0; a < A; ++a) {
        const double w = mass[i] * row[static_cast<std::size_t>(a)];
        if (w == 0.0) continue;
        joint[static_cast<std::size_t>(t)][cell(s, a)] += w;
        for (const auto& e : graph.edges(i, a)) mass[e.target] += w * e.prob;
      }
    }
    return joint;
  }

  enumerate_trajectories(
      cmp, policy, spec,
      [&](const History& h, double p) {
        for (std::size_t t = 0; t < h.actions.size(); ++t) joint[t][cell(h.states[t], h.actions[t])] += p;
      },
      options.enumeration_cap);
  return joint;
}

MarkovTimeVaryingPolicy markovianize(const Cmp& cmp, const Policy& policy, const EpisodeSpec& spec,
                                     const ExactOptions& options) {
  const auto joint = state_action_occupancy(cmp, policy, spec, options);
  const int S = cmp.num_states();
  const int A = cmp.num_actions();
  std::vector<double> tables;
  tables.reserve(joint.size() * static_cast<std::size_t>(S) * A);
  for (const auto& d : joint) {
    for (int s = 0; s < S; ++s) {
      double ds = 0.0;
      for (int a = 0; a < A; ++a) ds += d[static_cast<std::size_t>(s) * A + static_cast<std::size_t>(a)];
      for (int a = 0; a < A; ++a)
        tables.push_back(ds > 0.0 ? d[static_cast<std::size_t>(s) * A + static_cast<std::size_t>(a)] / ds : 1.0 / A);
      // Renormalize so the row passes the 1e-12 stochasticity check exactly.
      double sum = 0.0;
      for (int a = 0; a < A; ++a) sum += tables[tables.size() - static_cast<std::size_t>(A) + static_cast<std::size_t>(a)];
      for (int a = 0; a < A; ++a) tables[tables.size() - static_cast<std::size_t>(A) + static_cast<std::size_t>(a)] /= sum;
    }
  }
  return MarkovTimeVaryingPolicy(S, A, spec.horizon, std::move(tables));
}

}  // namespace maxent
