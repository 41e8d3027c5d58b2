#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

#include "maxent/cmp.hpp"

namespace maxent {

struct SearchConfig {
  int budget = 10'000;           // UCT iterations per decision
  double uct_c = 1.0;
  std::optional<int> max_depth;  // tree + rollout depth cap in steps; none = to the horizon
  std::uint64_t seed = 0;
};

struct ChildStats {
  int action = 0;
  int visits = 0;
  double value_sum = 0.0;
  double mean() const { return visits > 0 ? value_sum / visits : 0.0; }
};

struct RootStats {
  int visits = 0;
  double value_sum = 0.0;
  std::vector<ChildStats> children;
  std::size_t tree_nodes = 0;

  nlohmann::json to_json() const;
};

struct PlanResult {
  int action = 0;
  RootStats root;
};

/// UCT search from the node (counts, state); counts include the current
/// state. Leaves are scored by the entropy of the counts accumulated from
/// the episode start. Returns the most visited root action (lowest index on
/// ties). Throws EpisodeFinished when sum(counts) == T and BudgetZero when
/// budget < 1.
PlanResult plan_action(const Cmp& cmp, const EpisodeSpec& spec, const VisitCounts& counts, int state,
                       const SearchConfig& config);

struct MctsEpisode {
  History history;
  double entropy = 0.0;
};

/// One full episode from s_0 ~ mu with every action chosen by plan_action at
/// the realized node. Environment draws and per-step search seeds are
/// derived from `seed`; config.seed is ignored.
/// Search seed used for the decision at time index t of an episode.
std::uint64_t mcts_step_seed(std::uint64_t episode_seed, int t);

MctsEpisode rollout_episode_with_mcts(const Cmp& cmp, const EpisodeSpec& spec, const SearchConfig& config,
                                      std::uint64_t seed);

}  // namespace maxent
