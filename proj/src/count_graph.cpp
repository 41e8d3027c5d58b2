#include "maxent/count_graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "maxent/entropy.hpp"
#include "maxent/error.hpp"

namespace maxent {

CountCodec::CountCodec(int num_states, int horizon) : num_states_(num_states), horizon_(horizon) {
  if (num_states < 1 || horizon < 1) throw Error(ErrorKind::InvalidArgument, "count codec needs S >= 1 and T >= 1");
  const auto radix = static_cast<std::uint64_t>(horizon) + 1;
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t pow = 1;
  radix_pow_.reserve(static_cast<std::size_t>(num_states));
  for (int s = 0; s < num_states; ++s) {
    radix_pow_.push_back(pow);
    if (pow > kMax / radix) throw Error(ErrorKind::CapExceeded, "count vector does not fit a 64-bit key", {{"states", num_states}, {"horizon", horizon}});
    pow *= radix;
  }
  if (pow > kMax / static_cast<std::uint64_t>(num_states))
    throw Error(ErrorKind::CapExceeded, "count vector does not fit a 64-bit key", {{"states", num_states}, {"horizon", horizon}});
}

std::uint64_t CountCodec::encode(std::span<const int> counts, int state) const {
  std::uint64_t code = 0;
  for (std::size_t s = 0; s < counts.size(); ++s) code += radix_pow_[s] * static_cast<std::uint64_t>(counts[s]);
  return code * static_cast<std::uint64_t>(num_states_) + static_cast<std::uint64_t>(state);
}

std::vector<int> CountCodec::counts(std::uint64_t key) const {
  std::vector<int> out(static_cast<std::size_t>(num_states_));
  std::uint64_t code = key / static_cast<std::uint64_t>(num_states_);
  const auto radix = static_cast<std::uint64_t>(horizon_) + 1;
  for (auto& c : out) {
    c = static_cast<int>(code % radix);
    code /= radix;
  }
  return out;
}

int CountCodec::depth(std::uint64_t key) const {
  std::uint64_t code = key / static_cast<std::uint64_t>(num_states_);
  const auto radix = static_cast<std::uint64_t>(horizon_) + 1;
  int d = 0;
  for (int s = 0; s < num_states_; ++s) {
    d += static_cast<int>(code % radix);
    code /= radix;
  }
  return d;
}

double CountCodec::entropy(std::uint64_t key) const { return count_entropy(counts(key), horizon_); }

double estimate_count_nodes(int num_states, int horizon, int start_depth) {
  // C(k + S - 1, S - 1) count vectors extend a fixed one by k visits.
  double total = 0.0;
  for (int k = 0; k <= horizon - start_depth; ++k) {
    double c = 1.0;
    for (int j = 1; j < num_states; ++j) c = c * (k + j) / j;
    total += c * num_states;
  }
  return total;
}

CountGraph CountGraph::from_initial(const Cmp& cmp, int horizon, std::uint64_t node_cap) {
  const double estimate = estimate_count_nodes(cmp.num_states(), horizon, 1);
  if (estimate > static_cast<double>(node_cap))
    throw Error(ErrorKind::CapExceeded, "count graph would exceed the node cap",
                {{"estimated_nodes", estimate}, {"cap", node_cap}});
  CountCodec codec(cmp.num_states(), horizon);
  std::vector<std::uint64_t> keys;
  std::vector<double> mass;
  std::vector<int> counts(static_cast<std::size_t>(cmp.num_states()), 0);
  for (int s = 0; s < cmp.num_states(); ++s) {
    if (cmp.initial()[static_cast<std::size_t>(s)] <= 0.0) continue;
    counts[static_cast<std::size_t>(s)] = 1;
    keys.push_back(codec.encode(counts, s));
    mass.push_back(cmp.initial()[static_cast<std::size_t>(s)]);
    counts[static_cast<std::size_t>(s)] = 0;
  }
  return CountGraph(cmp, horizon, std::move(keys), std::move(mass), node_cap);
}

CountGraph CountGraph::from_prefix(const Cmp& cmp, int horizon, const History& prefix, std::uint64_t node_cap) {
  check_history(cmp, prefix);
  if (prefix.states.size() > static_cast<std::size_t>(horizon))
    throw Error(ErrorKind::InconsistentPrefix, "prefix is longer than the horizon",
                {{"prefix", format_history(prefix)}, {"horizon", horizon}});
  const int start = static_cast<int>(prefix.states.size());
  const double estimate = estimate_count_nodes(cmp.num_states(), horizon, start);
  if (estimate > static_cast<double>(node_cap))
    throw Error(ErrorKind::CapExceeded, "count graph would exceed the node cap",
                {{"estimated_nodes", estimate}, {"cap", node_cap}});
  CountCodec codec(cmp.num_states(), horizon);
  const auto counts = VisitCounts::of(prefix, cmp.num_states(), horizon);
  return CountGraph(cmp, horizon, {codec.encode(counts.counts, prefix.last_state())}, {1.0}, node_cap);
}

CountGraph::CountGraph(const Cmp& cmp, int horizon, std::vector<std::uint64_t> root_keys, std::vector<double> root_mass,
                       std::uint64_t node_cap)
    : codec_(cmp.num_states(), horizon), num_actions_(cmp.num_actions()) {
  if (root_keys.empty()) throw Error(ErrorKind::InvalidArgument, "count graph needs at least one root");
  root_depth_ = codec_.depth(root_keys.front());
  const int S = cmp.num_states();
  const int A = num_actions_;

  std::vector<std::uint64_t> layer = root_keys;
  std::sort(layer.begin(), layer.end());
  layer.erase(std::unique(layer.begin(), layer.end()), layer.end());

  for (int d = root_depth_;; ++d) {
    layer_offsets_.push_back(keys_.size());
    keys_.insert(keys_.end(), layer.begin(), layer.end());
    depth_.insert(depth_.end(), layer.size(), d);
    if (keys_.size() > node_cap)
      throw Error(ErrorKind::CapExceeded, "count graph exceeded the node cap", {{"nodes", keys_.size()}, {"cap", node_cap}});
    if (d == horizon) break;
    std::vector<std::uint64_t> next;
    for (auto key : layer) {
      const int s = codec_.state(key);
      for (int a = 0; a < A; ++a)
        for (int n = 0; n < S; ++n)
          if (cmp.p(s, a, n) > 0.0) next.push_back(codec_.advance(key, n));
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    layer = std::move(next);
  }
  layer_offsets_.push_back(keys_.size());

  edge_offsets_.assign(keys_.size() * static_cast<std::size_t>(A) + 1, 0);
  for (std::size_t i = 0; i < keys_.size(); ++i) {
    const int s = codec_.state(keys_[i]);
    for (int a = 0; a < A; ++a) {
      if (depth_[i] < horizon) {
        for (int n = 0; n < S; ++n) {
          const double p = cmp.p(s, a, n);
          if (p <= 0.0) continue;
          const auto target = find(codec_.advance(keys_[i], n));
          edges_.push_back({*target, p});
        }
      }
      edge_offsets_[i * static_cast<std::size_t>(A) + static_cast<std::size_t>(a) + 1] = edges_.size();
    }
  }

  for (std::size_t r = 0; r < root_keys.size(); ++r) roots_.push_back({*find(root_keys[r]), root_mass[r]});
}

std::optional<std::uint32_t> CountGraph::find(std::uint64_t key) const {
  const int d = codec_.depth(key);
  if (d < root_depth_ || d > horizon()) return std::nullopt;
  const auto first = keys_.begin() + static_cast<std::ptrdiff_t>(layer_begin(d));
  const auto last = keys_.begin() + static_cast<std::ptrdiff_t>(layer_end(d));
  const auto it = std::lower_bound(first, last, key);
  if (it == last || *it != key) return std::nullopt;
  return static_cast<std::uint32_t>(it - keys_.begin());
}

}  // namespace maxent
