#pragma once

#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "maxent/cmp.hpp"
#include "maxent/evaluation.hpp"
#include "maxent/nm_solver.hpp"
#include "maxent/policy.hpp"

namespace maxent {

/// Entropies separating two final entropies as distinct.
inline constexpr double kEntropyTieTolerance = 1e-12;

/// Best, second-best-distinct and worst final entropies over the count
/// vectors reachable from a prefix, with witness count vectors.
struct ExtremalEntropies {
  double h_star = 0.0;
  std::vector<std::vector<int>> argmax_counts;
  std::optional<double> h_second;  // absent when every continuation is optimal
  std::vector<int> second_witness;
  double h_worst = 0.0;
  std::vector<int> worst_witness;
};

ExtremalEntropies extremal_continuation_entropies(const Cmp& cmp, const EpisodeSpec& spec, const History& prefix,
                                                  std::uint64_t node_cap = kDefaultNodeCap);

/// H*(prefix) - E_{continuation ~ policy}[H(d_{prefix + continuation})], with
/// H* the optimal expected final entropy from the prefix.
double regret_to_go(const Cmp& cmp, const Policy& policy, const EpisodeSpec& spec, const History& prefix,
                    const ExactOptions& options = {});

/// Var over histories hs ~ p_t^{pi_NM} that end in `state` at time index
/// `time` of E[1{pi_NM(hs) in actions}]; p(1 - p) for deterministic policies.
/// Throws UnreachableCondition when no mass reaches (state, time).
double nm_action_variance(const Cmp& cmp, const NonMarkovCountPolicy& nm_policy, const EpisodeSpec& spec, int state,
                          int time, std::span<const int> actions, std::uint64_t node_cap = kDefaultNodeCap);
inline double nm_action_variance(const Cmp& cmp, const NonMarkovCountPolicy& nm_policy, const EpisodeSpec& spec,
                                 int state, int time, int action) {
  const int actions[] = {action};
  return nm_action_variance(cmp, nm_policy, spec, state, time, actions);
}

enum class BoundStatus { Ok, ZeroProbabilityOptAction, UnreachableCondition };
std::string_view to_string(BoundStatus status);

struct RegretReport {
  History prefix;
  int t = 0;  // prefix length in states
  double h_star = 0.0;
  std::optional<double> h_second;
  double h_worst = 0.0;
  double regret = 0.0;  // true regret-to-go of the evaluated policy, computed exactly
  std::optional<double> lower_bound;
  std::optional<double> upper_bound;
  std::optional<double> variance_term;
  double markov_prob_opt = 0.0;  // summed probability of the optimal actions
  int a_star = 0;
  std::vector<int> optimal_actions;
  BoundStatus status = BoundStatus::Ok;

  /// lower <= regret <= upper + tol; false when the bounds are undefined.
  bool sandwich_holds(double tol = 1e-9) const;
  nlohmann::json to_json() const;
};

/// Lower/upper regret-to-go bounds (H* - H2*) V / pi(a*) and (H* - H_) V / pi(a*)
/// for `policy` at the prefix, with V the non-Markovian action variance at
/// the prefix's current (state, time). Ties use the summed probability of all
/// optimal actions. The report's regret is computed independently.
RegretReport regret_bounds(const Cmp& cmp, const EpisodeSpec& spec, const History& prefix, const Policy& policy,
                           const NonMarkovSolution& nm, const ExactOptions& options = {});

struct PseudoInstantaneousRegret {
  double r_t = 0.0;
  std::optional<double> lower;
  std::optional<double> upper;
  RegretReport at_t;
  RegretReport at_t_plus_1;
};

/// r_t = max(0, R_{T-t}(h_t) - R_{T-t-1}(h_{t+1})) with bounds
/// max(0, V_t (H*_t - H2*_t) - V_{t+1} (H*_{t+1} - H_{t+1})) and
/// max(0, V_t (H*_t - H_t) - V_{t+1} (H*_{t+1} - H2*_{t+1})).
PseudoInstantaneousRegret pseudo_instantaneous_regret(const Cmp& cmp, const EpisodeSpec& spec, const Policy& policy,
                                                      const History& prefix_t, const History& prefix_t_plus_1,
                                                      const NonMarkovSolution& nm, const ExactOptions& options = {});

}  // namespace maxent
