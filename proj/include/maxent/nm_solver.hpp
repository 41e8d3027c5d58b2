#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "maxent/cmp.hpp"
#include "maxent/count_graph.hpp"
#include "maxent/policy.hpp"

namespace maxent {

/// Q-values closer than this to the maximum count as optimal.
inline constexpr double kArgmaxTolerance = 1e-12;

struct ValueEntry {
  std::uint64_t key;
  double value;
  std::vector<int> argmax;  // empty at terminal nodes
};

/// Backward-induction values over (counts, state) nodes of the extended
/// problem. Terminal nodes hold H(counts / T).
class ValueTable {
 public:
  ValueTable(CountCodec codec, std::vector<ValueEntry> entries, double optimal_value);

  const CountCodec& codec() const noexcept { return codec_; }
  double optimal_value() const noexcept { return optimal_value_; }
  const std::vector<ValueEntry>& entries() const noexcept { return entries_; }

  const ValueEntry* find(std::uint64_t key) const;
  const ValueEntry* find(std::span<const int> counts, int state) const { return find(codec_.encode(counts, state)); }

  /// count_0..count_{S-1},state,value,argmax_actions (';'-joined), one row per node.
  void write_csv(std::ostream& out) const;

 private:
  CountCodec codec_;
  std::vector<ValueEntry> entries_;  // ascending key
  double optimal_value_;
};

struct NonMarkovSolution {
  NonMarkovCountPolicy policy;  // deterministic, lowest-index argmax
  ValueTable values;
};

/// Optimal deterministic non-Markovian policy for E[H(d_h)] by backward
/// induction over the count graph. Without a prefix the graph starts from mu
/// and optimal_value = max_pi E[H(d_h)]; with one it starts at the prefix node
/// and optimal_value is the best expected final entropy from there.
NonMarkovSolution solve_non_markovian(const Cmp& cmp, const EpisodeSpec& spec,
                                      const std::optional<History>& prefix = std::nullopt,
                                      std::uint64_t node_cap = kDefaultNodeCap);

}  // namespace maxent
