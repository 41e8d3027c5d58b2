#include "maxent/mcts.hpp"

#include <cmath>
#include <limits>

#include "maxent/entropy.hpp"
#include "maxent/error.hpp"
#include "maxent/rng.hpp"

namespace maxent {
namespace {

struct Node {
  int state;
  int visits = 0;
  std::vector<int> action_visits;
  std::vector<double> action_value;
  // children[a] holds (next state, node index) pairs.
  std::vector<std::vector<std::pair<int, int>>> children;

  Node(int s, int num_actions)
      : state(s), action_visits(static_cast<std::size_t>(num_actions), 0),
        action_value(static_cast<std::size_t>(num_actions), 0.0),
        children(static_cast<std::size_t>(num_actions)) {}
};

int select_action(const Node& node, double c) {
  const int A = static_cast<int>(node.action_visits.size());
  for (int a = 0; a < A; ++a)
    if (node.action_visits[static_cast<std::size_t>(a)] == 0) return a;
  const double log_n = std::log(static_cast<double>(node.visits));
  int best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < A; ++a) {
    const auto i = static_cast<std::size_t>(a);
    const double n = node.action_visits[i];
    const double score = node.action_value[i] / n + c * std::sqrt(log_n / n);
    if (score > best_score) {
      best_score = score;
      best = a;
    }
  }
  return best;
}

int sample_next(const Cmp& cmp, int s, int a, Rng& rng) { return sample_index(cmp.row(s, a), rng); }

/// Entropy of the accumulated counts; normalized by their sum so that a
/// depth-cut leaf still scores in [0, log S].
double leaf_value(const std::vector<int>& counts, int depth) {
  return count_entropy(counts, depth);
}

}  // namespace

nlohmann::json RootStats::to_json() const {
  nlohmann::json kids = nlohmann::json::array();
  for (const auto& c : children)
    kids.push_back({{"action", c.action}, {"visits", c.visits}, {"value_sum", c.value_sum}, {"mean", c.mean()}});
  return {{"visits", visits}, {"value_sum", value_sum}, {"tree_nodes", tree_nodes}, {"children", kids}};
}

PlanResult plan_action(const Cmp& cmp, const EpisodeSpec& spec, const VisitCounts& counts, int state,
                       const SearchConfig& config) {
  spec.validate();
  if (config.budget < 1) throw Error(ErrorKind::BudgetZero, "search budget must be at least 1", {{"budget", config.budget}});
  if (config.uct_c < 0.0) throw Error(ErrorKind::InvalidArgument, "uct_c must be nonnegative", {{"uct_c", config.uct_c}});
  const int S = cmp.num_states();
  const int A = cmp.num_actions();
  if (static_cast<int>(counts.counts.size()) != S || state < 0 || state >= S || counts.counts[static_cast<std::size_t>(state)] < 1)
    throw Error(ErrorKind::InvalidArgument, "search root is not a valid (counts, state) node");
  const int root_depth = counts.total();
  if (root_depth >= spec.horizon)
    throw Error(ErrorKind::EpisodeFinished, "episode already has T states", {{"depth", root_depth}, {"horizon", spec.horizon}});

  int end_depth = spec.horizon;
  if (config.max_depth) {
    if (*config.max_depth < 1) throw Error(ErrorKind::InvalidArgument, "max_depth must be at least 1");
    end_depth = std::min(end_depth, root_depth + *config.max_depth);
  }

  Rng rng = stream_rng(config.seed, 0);
  std::vector<Node> tree;
  tree.emplace_back(state, A);
  std::vector<int> path_nodes;
  std::vector<int> path_actions;
  std::vector<int> work(counts.counts);

  for (int iter = 0; iter < config.budget; ++iter) {
    work = counts.counts;
    path_nodes.assign(1, 0);
    path_actions.clear();
    int node = 0;
    int depth = root_depth;
    bool expanded = false;
    // Selection and one-node expansion.
    while (depth < end_depth && !expanded) {
      const int a = select_action(tree[static_cast<std::size_t>(node)], config.uct_c);
      const int s = tree[static_cast<std::size_t>(node)].state;
      const int next = sample_next(cmp, s, a, rng);
      ++work[static_cast<std::size_t>(next)];
      ++depth;
      path_actions.push_back(a);
      auto& kids = tree[static_cast<std::size_t>(node)].children[static_cast<std::size_t>(a)];
      int child = -1;
      for (const auto& [ks, kn] : kids)
        if (ks == next) child = kn;
      if (child < 0) {
        child = static_cast<int>(tree.size());
        kids.emplace_back(next, child);
        tree.emplace_back(next, A);
        expanded = true;
      }
      node = child;
      path_nodes.push_back(node);
    }
    // Uniform random rollout to the horizon or the depth cut.
    int s = tree[static_cast<std::size_t>(node)].state;
    while (depth < end_depth) {
      const int a = static_cast<int>(uniform01(rng) * A);
      s = sample_next(cmp, s, a, rng);
      ++work[static_cast<std::size_t>(s)];
      ++depth;
    }
    const double value = leaf_value(work, depth);
    for (std::size_t i = 0; i < path_nodes.size(); ++i) {
      auto& n = tree[static_cast<std::size_t>(path_nodes[i])];
      ++n.visits;
      if (i < path_actions.size()) {
        const auto a = static_cast<std::size_t>(path_actions[i]);
        ++n.action_visits[a];
        n.action_value[a] += value;
      }
    }
  }

  PlanResult result;
  const auto& root = tree.front();
  result.root.visits = root.visits;
  result.root.tree_nodes = tree.size();
  int best = 0;
  for (int a = 0; a < A; ++a) {
    const auto i = static_cast<std::size_t>(a);
    result.root.children.push_back({a, root.action_visits[i], root.action_value[i]});
    result.root.value_sum += root.action_value[i];
    if (root.action_visits[i] > root.action_visits[static_cast<std::size_t>(best)]) best = a;
  }
  result.action = best;
  return result;
}

std::uint64_t mcts_step_seed(std::uint64_t episode_seed, int t) {
  return splitmix64(episode_seed ^ splitmix64(static_cast<std::uint64_t>(t) + 1));
}

MctsEpisode rollout_episode_with_mcts(const Cmp& cmp, const EpisodeSpec& spec, const SearchConfig& config,
                                      std::uint64_t seed) {
  spec.validate();
  Rng env = stream_rng(seed, 0);
  MctsEpisode out;
  auto& h = out.history;
  h.states.push_back(sample_index(cmp.initial(), env));
  VisitCounts counts{std::vector<int>(static_cast<std::size_t>(cmp.num_states()), 0), spec.horizon};
  counts.add(h.states.back());
  double log_p = std::log(cmp.initial()[static_cast<std::size_t>(h.states.back())]);
  for (int t = 0; t + 1 < spec.horizon; ++t) {
    SearchConfig step = config;
    step.seed = mcts_step_seed(seed, t);
    const int a = plan_action(cmp, spec, counts, h.states.back(), step).action;
    const int next = sample_index(cmp.row(h.states.back(), a), env);
    log_p += std::log(cmp.p(h.states.back(), a, next));
    h.actions.push_back(a);
    h.states.push_back(next);
    counts.add(next);
  }
  // log_probability covers the dynamics only; the planner is deterministic.
  h.log_probability = log_p;
  out.entropy = count_entropy(counts.counts, spec.horizon);
  return out;
}

}  // namespace maxent
