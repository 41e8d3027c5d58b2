#include "maxent/regret.hpp"

#include <algorithm>
#include <cmath>

#include "maxent/count_graph.hpp"
#include "maxent/error.hpp"

namespace maxent {

ExtremalEntropies extremal_continuation_entropies(const Cmp& cmp, const EpisodeSpec& spec, const History& prefix,
                                                  std::uint64_t node_cap) {
  spec.validate();
  const auto graph = CountGraph::from_prefix(cmp, spec.horizon, prefix, node_cap);
  const auto& codec = graph.codec();
  // Terminal nodes differing only in the final state share a count vector.
  std::vector<std::pair<double, std::vector<int>>> finals;
  for (auto i = graph.layer_begin(spec.horizon); i < graph.layer_end(spec.horizon); ++i) {
    auto counts = graph.counts(i);
    if (!finals.empty() && finals.back().second == counts) continue;
    finals.emplace_back(codec.entropy(graph.key(i)), std::move(counts));
  }
  std::sort(finals.begin(), finals.end());
  finals.erase(std::unique(finals.begin(), finals.end()), finals.end());

  ExtremalEntropies out;
  out.h_star = std::max_element(finals.begin(), finals.end(), [](const auto& l, const auto& r) { return l.first < r.first; })->first;
  const auto worst = std::min_element(finals.begin(), finals.end(), [](const auto& l, const auto& r) { return l.first < r.first; });
  out.h_worst = worst->first;
  out.worst_witness = worst->second;
  for (const auto& [h, counts] : finals) {
    if (h >= out.h_star - kEntropyTieTolerance) {
      out.argmax_counts.push_back(counts);
    } else if (!out.h_second || h > *out.h_second) {
      out.h_second = h;
      out.second_witness = counts;
    }
  }
  return out;
}

double regret_to_go(const Cmp& cmp, const Policy& policy, const EpisodeSpec& spec, const History& prefix,
                    const ExactOptions& options) {
  const auto best = solve_non_markovian(cmp, spec, prefix, options.node_cap).values.optimal_value();
  return best - expected_continuation_entropy(cmp, policy, spec, prefix, options);
}

double nm_action_variance(const Cmp& cmp, const NonMarkovCountPolicy& nm_policy, const EpisodeSpec& spec, int state,
                          int time, std::span<const int> actions, std::uint64_t node_cap) {
  spec.validate();
  if (time < 0 || time + 1 >= spec.horizon)
    throw Error(ErrorKind::InvalidArgument, "time index must leave a decision to make", {{"time", time}});
  if (nm_policy.horizon() != spec.horizon)
    throw Error(ErrorKind::HorizonMismatch, "count policy was built for a different horizon");
  const auto graph = CountGraph::from_initial(cmp, spec.horizon, node_cap);
  const Policy policy(nm_policy);
  std::vector<double> mass(graph.size(), 0.0);
  for (const auto& r : graph.roots()) mass[r.node] += r.mass;
  const int depth = time + 1;
  for (std::size_t i = 0; i < graph.layer_begin(depth); ++i) {
    if (mass[i] == 0.0) continue;
    const auto row = act_at_node(policy, graph.codec(), graph.key(i), graph.depth(i) - 1);
    for (int a = 0; a < graph.num_actions(); ++a) {
      const double w = mass[i] * row[static_cast<std::size_t>(a)];
      if (w == 0.0) continue;
      for (const auto& e : graph.edges(i, a)) mass[e.target] += w * e.prob;
    }
  }
  double total = 0.0;
  double first = 0.0;
  double second = 0.0;
  for (auto i = graph.layer_begin(depth); i < graph.layer_end(depth); ++i) {
    if (graph.state(i) != state || mass[i] == 0.0) continue;
    const auto& row = nm_policy.row(graph.key(i));
    double q = 0.0;
    for (int a : actions) q += row[static_cast<std::size_t>(a)];
    total += mass[i];
    first += mass[i] * q;
    second += mass[i] * q * q;
  }
  if (total <= 0.0)
    throw Error(ErrorKind::UnreachableCondition, "no probability mass reaches this state at this time",
                {{"state", state}, {"time", time}});
  const double p = first / total;
  return std::max(0.0, second / total - p * p);
}

std::string_view to_string(BoundStatus status) {
  switch (status) {
    case BoundStatus::Ok: return "ok";
    case BoundStatus::ZeroProbabilityOptAction: return "ZeroProbabilityOptAction";
    case BoundStatus::UnreachableCondition: return "UnreachableCondition";
  }
  return "unknown";
}

bool RegretReport::sandwich_holds(double tol) const {
  if (!lower_bound || !upper_bound) return false;
  return *lower_bound <= regret + tol && regret <= *upper_bound + tol;
}

nlohmann::json RegretReport::to_json() const {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  return {{"prefix", format_history(prefix)},
          {"t", t},
          {"H_star", h_star},
          {"H_second", opt(h_second)},
          {"H_worst", h_worst},
          {"regret", regret},
          {"lower", opt(lower_bound)},
          {"upper", opt(upper_bound)},
          {"variance_term", opt(variance_term)},
          {"prob_opt", markov_prob_opt},
          {"a_star", a_star},
          {"optimal_actions", optimal_actions},
          {"status", std::string(to_string(status))}};
}

RegretReport regret_bounds(const Cmp& cmp, const EpisodeSpec& spec, const History& prefix, const Policy& policy,
                           const NonMarkovSolution& nm, const ExactOptions& options) {
  check_history(cmp, prefix);
  RegretReport report;
  report.prefix = prefix;
  report.t = static_cast<int>(prefix.states.size());

  const auto extremal = extremal_continuation_entropies(cmp, spec, prefix, options.node_cap);
  report.h_star = extremal.h_star;
  report.h_second = extremal.h_second;
  report.h_worst = extremal.h_worst;
  report.regret = regret_to_go(cmp, policy, spec, prefix, options);

  if (report.t >= spec.horizon) {
    // Nothing left to decide: zero regret, zero bounds.
    report.variance_term = 0.0;
    report.lower_bound = 0.0;
    report.upper_bound = 0.0;
    report.markov_prob_opt = 1.0;
    return report;
  }

  const auto counts = VisitCounts::of(prefix, cmp.num_states(), spec.horizon);
  const auto* entry = nm.values.find(counts.counts, prefix.last_state());
  if (!entry)
    throw Error(ErrorKind::InconsistentPrefix, "prefix node is not in the value table", {{"prefix", format_history(prefix)}});
  report.optimal_actions = entry->argmax;
  report.a_star = nm.policy.action(entry->key);

  const auto row = act(policy, {prefix.states, prefix.actions});
  for (int a : report.optimal_actions) report.markov_prob_opt += row[static_cast<std::size_t>(a)];

  try {
    report.variance_term = nm_action_variance(cmp, nm.policy, spec, prefix.last_state(), report.t - 1,
                                              report.optimal_actions, options.node_cap);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::UnreachableCondition) throw;
    report.status = BoundStatus::UnreachableCondition;
    return report;
  }
  if (!(report.markov_prob_opt > 0.0)) {
    report.status = BoundStatus::ZeroProbabilityOptAction;
    return report;
  }
  const double scale = *report.variance_term / report.markov_prob_opt;
  report.lower_bound = report.h_second ? (report.h_star - *report.h_second) * scale : 0.0;
  report.upper_bound = (report.h_star - report.h_worst) * scale;
  return report;
}

PseudoInstantaneousRegret pseudo_instantaneous_regret(const Cmp& cmp, const EpisodeSpec& spec, const Policy& policy,
                                                      const History& prefix_t, const History& prefix_t_plus_1,
                                                      const NonMarkovSolution& nm, const ExactOptions& options) {
  const bool extends = prefix_t_plus_1.states.size() == prefix_t.states.size() + 1 &&
                       std::equal(prefix_t.states.begin(), prefix_t.states.end(), prefix_t_plus_1.states.begin()) &&
                       std::equal(prefix_t.actions.begin(), prefix_t.actions.end(), prefix_t_plus_1.actions.begin());
  if (!extends)
    throw Error(ErrorKind::InconsistentPrefix, "second prefix must extend the first by one step",
                {{"prefix_t", format_history(prefix_t)}, {"prefix_t_plus_1", format_history(prefix_t_plus_1)}});
  PseudoInstantaneousRegret out;
  out.at_t = regret_bounds(cmp, spec, prefix_t, policy, nm, options);
  out.at_t_plus_1 = regret_bounds(cmp, spec, prefix_t_plus_1, policy, nm, options);
  out.r_t = std::max(0.0, out.at_t.regret - out.at_t_plus_1.regret);
  const auto& now = out.at_t;
  const auto& next = out.at_t_plus_1;
  if (now.status != BoundStatus::Ok || next.status != BoundStatus::Ok) return out;
  const double v_now = *now.variance_term / now.markov_prob_opt;
  const double v_next = *next.variance_term / next.markov_prob_opt;
  const double gap2_now = now.h_second ? now.h_star - *now.h_second : 0.0;
  const double gap2_next = next.h_second ? next.h_star - *next.h_second : 0.0;
  out.lower = std::max(0.0, v_now * gap2_now - v_next * (next.h_star - next.h_worst));
  out.upper = std::max(0.0, v_now * (now.h_star - now.h_worst) - v_next * gap2_next);
  return out;
}

}  // namespace maxent
