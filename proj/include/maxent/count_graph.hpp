#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "maxent/cmp.hpp"

namespace maxent {

inline constexpr std::uint64_t kDefaultNodeCap = 10'000'000;

/// Packs a (visit-count vector, current state) pair into one 64-bit key:
/// counts in mixed radix T+1, then the state in the low "digit".
/// Depth (number of states seen so far) is sum(counts); time index = depth - 1.
class CountCodec {
 public:
  CountCodec(int num_states, int horizon);

  int num_states() const noexcept { return num_states_; }
  int horizon() const noexcept { return horizon_; }

  std::uint64_t encode(std::span<const int> counts, int state) const;
  std::uint64_t advance(std::uint64_t key, int next_state) const {
    return (key / static_cast<std::uint64_t>(num_states_) + radix_pow_[static_cast<std::size_t>(next_state)]) *
               static_cast<std::uint64_t>(num_states_) +
           static_cast<std::uint64_t>(next_state);
  }
  int state(std::uint64_t key) const noexcept { return static_cast<int>(key % static_cast<std::uint64_t>(num_states_)); }
  std::vector<int> counts(std::uint64_t key) const;
  int depth(std::uint64_t key) const;
  /// H(counts / T).
  double entropy(std::uint64_t key) const;

 private:
  int num_states_;
  int horizon_;
  std::vector<std::uint64_t> radix_pow_;
};

/// Upper bound on (counts, state) nodes with depth in [start_depth, T]
/// when the counts at start_depth are fixed.
double estimate_count_nodes(int num_states, int horizon, int start_depth = 1);

/// Every (counts, state) node reachable from a set of same-depth roots under
/// some action sequence, laid out layer by layer in increasing depth with keys
/// sorted inside a layer. Edges are stored per (node, action).
class CountGraph {
 public:
  struct Edge {
    std::uint32_t target;
    double prob;
  };
  struct Root {
    std::uint32_t node;
    double mass;
  };

  /// Roots are the depth-1 nodes (e_s, s) weighted by mu(s).
  static CountGraph from_initial(const Cmp& cmp, int horizon, std::uint64_t node_cap = kDefaultNodeCap);
  /// A single root at the prefix's (counts, last state) node with mass 1.
  static CountGraph from_prefix(const Cmp& cmp, int horizon, const History& prefix,
                                std::uint64_t node_cap = kDefaultNodeCap);

  std::size_t size() const noexcept { return keys_.size(); }
  int horizon() const noexcept { return codec_.horizon(); }
  int num_actions() const noexcept { return num_actions_; }
  int root_depth() const noexcept { return root_depth_; }
  const CountCodec& codec() const noexcept { return codec_; }
  std::span<const Root> roots() const noexcept { return roots_; }

  std::uint64_t key(std::size_t i) const { return keys_[i]; }
  int state(std::size_t i) const { return codec_.state(keys_[i]); }
  int depth(std::size_t i) const { return depth_[i]; }
  bool terminal(std::size_t i) const { return depth_[i] == horizon(); }
  std::vector<int> counts(std::size_t i) const { return codec_.counts(keys_[i]); }
  std::span<const Edge> edges(std::size_t i, int a) const {
    const auto slot = i * static_cast<std::size_t>(num_actions_) + static_cast<std::size_t>(a);
    return {edges_.data() + edge_offsets_[slot], edge_offsets_[slot + 1] - edge_offsets_[slot]};
  }

  /// Node index range [begin, end) of a depth layer.
  std::size_t layer_begin(int depth) const { return layer_offsets_[static_cast<std::size_t>(depth - root_depth_)]; }
  std::size_t layer_end(int depth) const { return layer_offsets_[static_cast<std::size_t>(depth - root_depth_ + 1)]; }

  std::optional<std::uint32_t> find(std::uint64_t key) const;

 private:
  CountGraph(const Cmp& cmp, int horizon, std::vector<std::uint64_t> root_keys, std::vector<double> root_mass,
             std::uint64_t node_cap);

  CountCodec codec_;
  int num_actions_;
  int root_depth_;
  std::vector<std::uint64_t> keys_;
  std::vector<int> depth_;
  std::vector<std::size_t> layer_offsets_;
  std::vector<std::size_t> edge_offsets_;
  std::vector<Edge> edges_;
  std::vector<Root> roots_;
};

}  // namespace maxent
