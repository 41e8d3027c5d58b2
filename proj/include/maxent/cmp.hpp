#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace maxent {

/// Controlled Markov process: finite states and actions, a transition tensor
/// indexed [s][a][s'] and an initial state distribution. No reward.
///
/// Construction only checks shapes; stochasticity is checked by
/// validate_cmp() so that a malformed model can still be reported on.
class Cmp {
 public:
  Cmp(int num_states, int num_actions, std::vector<double> transitions, std::vector<double> initial,
      std::vector<std::string> state_labels = {});

  int num_states() const noexcept { return num_states_; }
  int num_actions() const noexcept { return num_actions_; }

  double p(int s, int a, int next) const {
    return transitions_[(static_cast<std::size_t>(s) * num_actions_ + a) * num_states_ + next];
  }
  std::span<const double> row(int s, int a) const {
    return {transitions_.data() + (static_cast<std::size_t>(s) * num_actions_ + a) * num_states_,
            static_cast<std::size_t>(num_states_)};
  }
  std::span<const double> transitions() const noexcept { return transitions_; }
  std::span<const double> initial() const noexcept { return initial_; }
  const std::vector<std::string>& state_labels() const noexcept { return labels_; }

  /// Label for display; falls back to the index.
  std::string label(int s) const;

 private:
  int num_states_;
  int num_actions_;
  std::vector<double> transitions_;
  std::vector<double> initial_;
  std::vector<std::string> labels_;
};

struct Violation {
  enum class Kind { NonStochasticRow, NegativeEntry, BadInitial };
  Kind kind;
  int state = -1;
  int action = -1;
  int next_state = -1;  // offending index for NegativeEntry
  double value = 0.0;   // row sum, or the negative entry
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const noexcept { return violations.empty(); }
};

inline constexpr double kStochasticTolerance = 1e-12;

/// Lists every violated invariant (non-stochastic rows with their sums,
/// negative entries, bad initial distribution).
ValidationReport validate_cmp(const Cmp& cmp);

/// Throws Error with the first violation's kind and the full report as details.
void require_valid(const Cmp& cmp);

/// Horizon T counts states: an episode is s_0 ... s_{T-1} with T-1 actions.
struct EpisodeSpec {
  int horizon = 1;
  std::optional<double> discount;

  void validate() const;
};

struct History {
  std::vector<int> states;
  std::vector<int> actions;
  std::optional<double> log_probability;

  std::size_t length() const noexcept { return states.size(); }
  int last_state() const { return states.back(); }
};

/// Throws InconsistentPrefix unless the history is well-formed for the CMP
/// and has positive probability under its dynamics for the taken actions.
void check_history(const Cmp& cmp, const History& h);

/// Parses "s0,a0,s1,a1,...,s_t" into a History.
History parse_history(std::string_view text);
std::string format_history(const History& h);

struct VisitCounts {
  std::vector<int> counts;
  int horizon = 0;

  static VisitCounts of(const History& h, int num_states, int horizon);
  int total() const noexcept;
  void add(int s) { ++counts[static_cast<std::size_t>(s)]; }
};

enum class DistributionKind { Step, Marginal, Discounted, Stationary, Visitation };

struct StateDistribution {
  std::vector<double> probabilities;
  DistributionKind kind = DistributionKind::Step;
};

}  // namespace maxent
