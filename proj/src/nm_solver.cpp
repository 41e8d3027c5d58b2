#include "maxent/nm_solver.hpp"

#include <algorithm>
#include <cstdio>

#include "maxent/error.hpp"

namespace maxent {

ValueTable::ValueTable(CountCodec codec, std::vector<ValueEntry> entries, double optimal_value)
    : codec_(std::move(codec)), entries_(std::move(entries)), optimal_value_(optimal_value) {
  std::sort(entries_.begin(), entries_.end(), [](const auto& l, const auto& r) { return l.key < r.key; });
}

const ValueEntry* ValueTable::find(std::uint64_t key) const {
  const auto it = std::lower_bound(entries_.begin(), entries_.end(), key, [](const auto& e, auto k) { return e.key < k; });
  return it != entries_.end() && it->key == key ? &*it : nullptr;
}

void ValueTable::write_csv(std::ostream& out) const {
  for (int s = 0; s < codec_.num_states(); ++s) out << "count_" << s << ',';
  out << "state,value,argmax_actions\n";
  char buf[64];
  // Rows ordered by depth, then key, so the file reads top-down.
  std::vector<const ValueEntry*> rows;
  rows.reserve(entries_.size());
  for (const auto& e : entries_) rows.push_back(&e);
  std::stable_sort(rows.begin(), rows.end(), [&](auto l, auto r) { return codec_.depth(l->key) < codec_.depth(r->key); });
  for (const auto* e : rows) {
    for (int c : codec_.counts(e->key)) out << c << ',';
    std::snprintf(buf, sizeof buf, "%.17g", e->value);
    out << codec_.state(e->key) << ',' << buf << ',';
    for (std::size_t i = 0; i < e->argmax.size(); ++i) out << (i ? ";" : "") << e->argmax[i];
    out << '\n';
  }
}

NonMarkovSolution solve_non_markovian(const Cmp& cmp, const EpisodeSpec& spec, const std::optional<History>& prefix,
                                      std::uint64_t node_cap) {
  spec.validate();
  require_valid(cmp);
  const auto graph = prefix ? CountGraph::from_prefix(cmp, spec.horizon, *prefix, node_cap)
                            : CountGraph::from_initial(cmp, spec.horizon, node_cap);
  const int A = cmp.num_actions();
  const auto& codec = graph.codec();
  std::vector<double> value(graph.size(), 0.0);
  std::vector<ValueEntry> entries(graph.size());
  NonMarkovCountPolicy policy(cmp.num_states(), A, spec.horizon);
  std::vector<double> q(static_cast<std::size_t>(A));

  for (std::size_t k = graph.size(); k-- > 0;) {
    auto& entry = entries[k];
    entry.key = graph.key(k);
    if (graph.terminal(k)) {
      value[k] = entry.value = codec.entropy(entry.key);
      continue;
    }
    for (int a = 0; a < A; ++a) {
      double v = 0.0;
      for (const auto& e : graph.edges(k, a)) v += e.prob * value[e.target];
      q[static_cast<std::size_t>(a)] = v;
    }
    const double best = *std::max_element(q.begin(), q.end());
    for (int a = 0; a < A; ++a)
      if (q[static_cast<std::size_t>(a)] >= best - kArgmaxTolerance) entry.argmax.push_back(a);
    value[k] = entry.value = best;
    policy.set_action(entry.key, entry.argmax.front());
  }

  double optimal = 0.0;
  for (const auto& r : graph.roots()) optimal += r.mass * value[r.node];
  return {std::move(policy), ValueTable(codec, std::move(entries), optimal)};
}

}  // namespace maxent
