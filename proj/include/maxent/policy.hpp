#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "maxent/cmp.hpp"
#include "maxent/count_graph.hpp"

namespace maxent {

using ActionDist = std::vector<double>;

/// What a policy sees when it acts: the history so far, ending in the current
/// state. time() is the index of the current state.
struct DecisionContext {
  std::span<const int> states;
  std::span<const int> actions;

  int time() const noexcept { return static_cast<int>(states.size()) - 1; }
  int state() const { return states.back(); }
};

class MarkovStationaryPolicy {
 public:
  MarkovStationaryPolicy(int num_states, int num_actions, std::vector<double> table);
  static MarkovStationaryPolicy uniform(int num_states, int num_actions);

  int num_states() const noexcept { return num_states_; }
  int num_actions() const noexcept { return num_actions_; }
  std::span<const double> row(int s) const {
    return {table_.data() + static_cast<std::size_t>(s) * num_actions_, static_cast<std::size_t>(num_actions_)};
  }
  const std::vector<double>& table() const noexcept { return table_; }

  friend bool operator==(const MarkovStationaryPolicy&, const MarkovStationaryPolicy&) = default;

 private:
  int num_states_;
  int num_actions_;
  std::vector<double> table_;
};

/// One decision rule per time index t in [0, T-2].
class MarkovTimeVaryingPolicy {
 public:
  MarkovTimeVaryingPolicy(int num_states, int num_actions, int horizon, std::vector<double> tables);

  int num_states() const noexcept { return num_states_; }
  int num_actions() const noexcept { return num_actions_; }
  int horizon() const noexcept { return horizon_; }
  std::span<const double> row(int t, int s) const {
    return {tables_.data() + (static_cast<std::size_t>(t) * num_states_ + s) * num_actions_,
            static_cast<std::size_t>(num_actions_)};
  }
  const std::vector<double>& tables() const noexcept { return tables_; }

  friend bool operator==(const MarkovTimeVaryingPolicy&, const MarkovTimeVaryingPolicy&) = default;

 private:
  int num_states_;
  int num_actions_;
  int horizon_;
  std::vector<double> tables_;
};

/// History-dependent policy keyed by the (visit counts, current state)
/// sufficient statistic.
class NonMarkovCountPolicy {
 public:
  NonMarkovCountPolicy(int num_states, int num_actions, int horizon);

  int num_states() const noexcept { return codec_.num_states(); }
  int num_actions() const noexcept { return num_actions_; }
  int horizon() const noexcept { return codec_.horizon(); }
  const CountCodec& codec() const noexcept { return codec_; }
  bool deterministic() const noexcept { return deterministic_; }
  std::size_t size() const noexcept { return decisions_.size(); }

  void set_action(std::span<const int> counts, int state, int action);
  void set_distribution(std::span<const int> counts, int state, ActionDist dist);
  void set_action(std::uint64_t key, int action);

  /// Throws MissingEntry for nodes without a decision.
  const ActionDist& row(std::uint64_t key) const;
  const ActionDist& row(std::span<const int> counts, int state) const { return row(codec_.encode(counts, state)); }
  bool contains(std::uint64_t key) const { return decisions_.count(key) != 0; }
  /// Lowest-index action with the largest probability (the action itself
  /// for deterministic policies).
  int action(std::uint64_t key) const;

  /// Decisions in ascending key order.
  std::vector<std::pair<std::uint64_t, const ActionDist*>> entries() const;

  friend bool operator==(const NonMarkovCountPolicy& l, const NonMarkovCountPolicy& r) {
    return l.num_actions_ == r.num_actions_ && l.num_states() == r.num_states() && l.horizon() == r.horizon() &&
           l.deterministic_ == r.deterministic_ && l.decisions_ == r.decisions_;
  }

 private:
  CountCodec codec_;
  int num_actions_;
  bool deterministic_ = true;
  std::unordered_map<std::uint64_t, ActionDist> decisions_;
};

/// Policy over the last `window` states and the actions between them.
/// Suffix keys are s_{t-k}, a_{t-k}, ..., a_{t-1}, s_t with k = min(window, t+1) - 1.
class FiniteWindowPolicy {
 public:
  FiniteWindowPolicy(int num_states, int num_actions, int window);

  int num_states() const noexcept { return num_states_; }
  int num_actions() const noexcept { return num_actions_; }
  int window() const noexcept { return window_; }
  const std::map<std::vector<int>, ActionDist>& table() const noexcept { return table_; }

  void set(std::vector<int> suffix, ActionDist dist);
  std::vector<int> suffix(const DecisionContext& ctx) const;
  const ActionDist& row(const std::vector<int>& suffix) const;

  friend bool operator==(const FiniteWindowPolicy&, const FiniteWindowPolicy&) = default;

 private:
  int num_states_;
  int num_actions_;
  int window_;
  std::map<std::vector<int>, ActionDist> table_;
};

/// Softmax policy over an eligibility trace z <- lambda z + onehot(s_t).
/// Logits: W[a] . [z, onehot(s_t)], weights stored A x 2S row-major.
class EligibilityTracePolicy {
 public:
  EligibilityTracePolicy(int num_states, int num_actions, double lambda, std::vector<double> weights);

  int num_states() const noexcept { return num_states_; }
  int num_actions() const noexcept { return num_actions_; }
  double lambda() const noexcept { return lambda_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

  std::vector<double> trace(std::span<const int> states) const;
  ActionDist probs(std::span<const double> trace, int state) const;

  friend bool operator==(const EligibilityTracePolicy&, const EligibilityTracePolicy&) = default;

 private:
  int num_states_;
  int num_actions_;
  double lambda_;
  std::vector<double> weights_;
};

enum class PolicyKind { MarkovStationary, MarkovTimeVarying, NonMarkovCount, FiniteWindow, EligibilityTrace };

std::string_view to_string(PolicyKind kind);

/// Closed sum of the supported policy classes. `horizon` is the episode
/// length the policy was built for; horizon-free classes carry 0 unless a
/// horizon is attached explicitly.
class Policy {
 public:
  using Variant = std::variant<MarkovStationaryPolicy, MarkovTimeVaryingPolicy, NonMarkovCountPolicy,
                               FiniteWindowPolicy, EligibilityTracePolicy>;

  Policy(MarkovStationaryPolicy p, int horizon = 0) : v_(std::move(p)), horizon_(horizon) {}
  Policy(MarkovTimeVaryingPolicy p) : v_(std::move(p)), horizon_(std::get<MarkovTimeVaryingPolicy>(v_).horizon()) {}
  Policy(NonMarkovCountPolicy p) : v_(std::move(p)), horizon_(std::get<NonMarkovCountPolicy>(v_).horizon()) {}
  Policy(FiniteWindowPolicy p, int horizon = 0) : v_(std::move(p)), horizon_(horizon) {}
  Policy(EligibilityTracePolicy p, int horizon = 0) : v_(std::move(p)), horizon_(horizon) {}

  const Variant& variant() const noexcept { return v_; }
  PolicyKind kind() const noexcept { return static_cast<PolicyKind>(v_.index()); }
  int horizon() const noexcept { return horizon_; }
  int num_states() const;
  int num_actions() const;

  bool is_markov() const noexcept {
    return kind() == PolicyKind::MarkovStationary || kind() == PolicyKind::MarkovTimeVarying;
  }
  /// Measurable in (counts, state, t); evaluable by count dynamic programming.
  bool is_count_measurable() const noexcept { return is_markov() || kind() == PolicyKind::NonMarkovCount; }

  template <class T>
  const T* get_if() const noexcept {
    return std::get_if<T>(&v_);
  }

  friend bool operator==(const Policy&, const Policy&) = default;

 private:
  Variant v_;
  int horizon_;
};

/// Action distribution for the current decision. Throws MissingEntry for
/// tabular gaps and FeatureMismatch when the context is out of range.
ActionDist act(const Policy& policy, const DecisionContext& ctx);

/// Action row at a count-graph node for count-measurable policies
/// (t = depth - 1). Throws PolicyClassMismatch otherwise.
std::span<const double> act_at_node(const Policy& policy, const CountCodec& codec, std::uint64_t key, int time);

/// Rejects a time-varying or count policy built for a different horizon, and
/// any policy whose state/action dimensions disagree with the CMP.
void check_policy_fits(const Policy& policy, const Cmp& cmp, const EpisodeSpec& spec);

}  // namespace maxent
