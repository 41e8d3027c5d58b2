#include "maxent/policy.hpp"

#include <algorithm>
#include <cmath>

#include "maxent/error.hpp"

namespace maxent {
namespace {

void check_row(std::span<const double> row, const char* what) {
  double sum = 0.0;
  for (double p : row) {
    if (!(p >= 0.0)) throw Error(ErrorKind::InvalidArgument, std::string(what) + ": negative action probability", {{"value", p}});
    sum += p;
  }
  if (!(std::abs(sum - 1.0) <= kStochasticTolerance))
    throw Error(ErrorKind::InvalidArgument, std::string(what) + ": action row does not sum to 1", {{"sum", sum}});
}

void check_dims(int num_states, int num_actions) {
  if (num_states < 1 || num_actions < 1) throw Error(ErrorKind::InvalidArgument, "policy needs S >= 1 and A >= 1");
}

}  // namespace

MarkovStationaryPolicy::MarkovStationaryPolicy(int num_states, int num_actions, std::vector<double> table)
    : num_states_(num_states), num_actions_(num_actions), table_(std::move(table)) {
  check_dims(num_states, num_actions);
  if (table_.size() != static_cast<std::size_t>(num_states) * num_actions)
    throw Error(ErrorKind::InvalidArgument, "stationary table has the wrong size");
  for (int s = 0; s < num_states; ++s) check_row(row(s), "markov_stationary");
}

MarkovStationaryPolicy MarkovStationaryPolicy::uniform(int num_states, int num_actions) {
  return {num_states, num_actions,
          std::vector<double>(static_cast<std::size_t>(num_states) * num_actions, 1.0 / num_actions)};
}

MarkovTimeVaryingPolicy::MarkovTimeVaryingPolicy(int num_states, int num_actions, int horizon, std::vector<double> tables)
    : num_states_(num_states), num_actions_(num_actions), horizon_(horizon), tables_(std::move(tables)) {
  check_dims(num_states, num_actions);
  if (horizon < 1) throw Error(ErrorKind::InvalidArgument, "horizon must be at least 1");
  if (tables_.size() != static_cast<std::size_t>(horizon - 1) * num_states * num_actions)
    throw Error(ErrorKind::InvalidArgument, "time-varying policy needs T-1 decision rules");
  for (int t = 0; t + 1 < horizon; ++t)
    for (int s = 0; s < num_states; ++s) check_row(row(t, s), "markov_time_varying");
}

NonMarkovCountPolicy::NonMarkovCountPolicy(int num_states, int num_actions, int horizon)
    : codec_(num_states, horizon), num_actions_(num_actions) {
  check_dims(num_states, num_actions);
}

void NonMarkovCountPolicy::set_action(std::uint64_t key, int action) {
  if (action < 0 || action >= num_actions_) throw Error(ErrorKind::InvalidArgument, "action out of range", {{"action", action}});
  ActionDist dist(static_cast<std::size_t>(num_actions_), 0.0);
  dist[static_cast<std::size_t>(action)] = 1.0;
  decisions_[key] = std::move(dist);
}

void NonMarkovCountPolicy::set_action(std::span<const int> counts, int state, int action) {
  set_action(codec_.encode(counts, state), action);
}

void NonMarkovCountPolicy::set_distribution(std::span<const int> counts, int state, ActionDist dist) {
  if (dist.size() != static_cast<std::size_t>(num_actions_))
    throw Error(ErrorKind::InvalidArgument, "action distribution has the wrong size");
  check_row(dist, "non_markov_count");
  const bool point = std::count(dist.begin(), dist.end(), 1.0) == 1;
  deterministic_ = deterministic_ && point;
  decisions_[codec_.encode(counts, state)] = std::move(dist);
}

const ActionDist& NonMarkovCountPolicy::row(std::uint64_t key) const {
  const auto it = decisions_.find(key);
  if (it == decisions_.end())
    throw Error(ErrorKind::MissingEntry, "count policy has no decision for this node",
                {{"counts", codec_.counts(key)}, {"state", codec_.state(key)}});
  return it->second;
}

int NonMarkovCountPolicy::action(std::uint64_t key) const {
  const auto& r = row(key);
  return static_cast<int>(std::max_element(r.begin(), r.end()) - r.begin());
}

std::vector<std::pair<std::uint64_t, const ActionDist*>> NonMarkovCountPolicy::entries() const {
  std::vector<std::pair<std::uint64_t, const ActionDist*>> out;
  out.reserve(decisions_.size());
  for (const auto& [k, v] : decisions_) out.emplace_back(k, &v);
  std::sort(out.begin(), out.end(), [](const auto& l, const auto& r) { return l.first < r.first; });
  return out;
}

FiniteWindowPolicy::FiniteWindowPolicy(int num_states, int num_actions, int window)
    : num_states_(num_states), num_actions_(num_actions), window_(window) {
  check_dims(num_states, num_actions);
  if (window < 1) throw Error(ErrorKind::InvalidArgument, "window length must be at least 1");
}

void FiniteWindowPolicy::set(std::vector<int> suffix, ActionDist dist) {
  if (suffix.empty() || suffix.size() % 2 == 0 || static_cast<int>(suffix.size()) > 2 * window_ - 1)
    throw Error(ErrorKind::InvalidArgument, "window suffix must alternate states and actions, end on a state, and fit the window");
  if (dist.size() != static_cast<std::size_t>(num_actions_))
    throw Error(ErrorKind::InvalidArgument, "action distribution has the wrong size");
  check_row(dist, "finite_window");
  table_[std::move(suffix)] = std::move(dist);
}

std::vector<int> FiniteWindowPolicy::suffix(const DecisionContext& ctx) const {
  const int n = std::min(window_, ctx.time() + 1);
  const int first = ctx.time() + 1 - n;
  std::vector<int> key;
  key.reserve(static_cast<std::size_t>(2 * n - 1));
  for (int k = first; k <= ctx.time(); ++k) {
    if (k > first) key.push_back(ctx.actions[static_cast<std::size_t>(k - 1)]);
    key.push_back(ctx.states[static_cast<std::size_t>(k)]);
  }
  return key;
}

const ActionDist& FiniteWindowPolicy::row(const std::vector<int>& suffix) const {
  const auto it = table_.find(suffix);
  if (it == table_.end()) throw Error(ErrorKind::MissingEntry, "finite-window policy has no entry for this suffix", {{"suffix", suffix}});
  return it->second;
}

EligibilityTracePolicy::EligibilityTracePolicy(int num_states, int num_actions, double lambda, std::vector<double> weights)
    : num_states_(num_states), num_actions_(num_actions), lambda_(lambda), weights_(std::move(weights)) {
  check_dims(num_states, num_actions);
  if (!(lambda > 0.0 && lambda < 1.0)) throw Error(ErrorKind::InvalidArgument, "trace decay must lie in (0,1)", {{"lambda", lambda}});
  if (weights_.size() != static_cast<std::size_t>(num_actions) * 2 * num_states)
    throw Error(ErrorKind::InvalidArgument, "eligibility weights must be A x 2S");
}

std::vector<double> EligibilityTracePolicy::trace(std::span<const int> states) const {
  std::vector<double> z(static_cast<std::size_t>(num_states_), 0.0);
  for (int s : states) {
    for (double& v : z) v *= lambda_;
    z[static_cast<std::size_t>(s)] += 1.0;
  }
  return z;
}

ActionDist EligibilityTracePolicy::probs(std::span<const double> trace, int state) const {
  const auto S = static_cast<std::size_t>(num_states_);
  ActionDist logits(static_cast<std::size_t>(num_actions_), 0.0);
  for (std::size_t a = 0; a < logits.size(); ++a) {
    const double* w = weights_.data() + a * 2 * S;
    double l = w[S + static_cast<std::size_t>(state)];
    for (std::size_t i = 0; i < S; ++i) l += w[i] * trace[i];
    logits[a] = l;
  }
  const double top = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double& l : logits) sum += (l = std::exp(l - top));
  for (double& l : logits) l /= sum;
  return logits;
}

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::MarkovStationary: return "markov_stationary";
    case PolicyKind::MarkovTimeVarying: return "markov_time_varying";
    case PolicyKind::NonMarkovCount: return "non_markov_count";
    case PolicyKind::FiniteWindow: return "finite_window";
    case PolicyKind::EligibilityTrace: return "eligibility_trace";
  }
  return "unknown";
}

int Policy::num_states() const {
  return std::visit([](const auto& p) { return p.num_states(); }, v_);
}

int Policy::num_actions() const {
  return std::visit([](const auto& p) { return p.num_actions(); }, v_);
}

ActionDist act(const Policy& policy, const DecisionContext& ctx) {
  if (ctx.states.empty() || ctx.actions.size() + 1 != ctx.states.size())
    throw Error(ErrorKind::FeatureMismatch, "decision context must hold one more state than actions");
  const int s = ctx.state();
  if (s < 0 || s >= policy.num_states()) throw Error(ErrorKind::FeatureMismatch, "state out of range", {{"state", s}});
  const int t = ctx.time();
  return std::visit(
      [&](const auto& p) -> ActionDist {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, MarkovStationaryPolicy>) {
          const auto r = p.row(s);
          return {r.begin(), r.end()};
        } else if constexpr (std::is_same_v<T, MarkovTimeVaryingPolicy>) {
          if (t + 1 >= p.horizon())
            throw Error(ErrorKind::FeatureMismatch, "no decision rule at this time index", {{"time", t}});
          const auto r = p.row(t, s);
          return {r.begin(), r.end()};
        } else if constexpr (std::is_same_v<T, NonMarkovCountPolicy>) {
          if (t + 1 >= p.horizon())
            throw Error(ErrorKind::FeatureMismatch, "no decision at the final time index", {{"time", t}});
          std::vector<int> counts(static_cast<std::size_t>(p.num_states()), 0);
          for (int x : ctx.states) ++counts[static_cast<std::size_t>(x)];
          return p.row(counts, s);
        } else if constexpr (std::is_same_v<T, FiniteWindowPolicy>) {
          return p.row(p.suffix(ctx));
        } else {
          return p.probs(p.trace(ctx.states), s);
        }
      },
      policy.variant());
}

std::span<const double> act_at_node(const Policy& policy, const CountCodec& codec, std::uint64_t key, int time) {
  if (const auto* p = policy.get_if<MarkovStationaryPolicy>()) return p->row(codec.state(key));
  if (const auto* p = policy.get_if<MarkovTimeVaryingPolicy>()) return p->row(time, codec.state(key));
  if (const auto* p = policy.get_if<NonMarkovCountPolicy>()) {
    if (p->codec().horizon() == codec.horizon()) return p->row(key);
    return p->row(codec.counts(key), codec.state(key));
  }
  throw Error(ErrorKind::PolicyClassMismatch, "policy is not measurable in (counts, state)",
              {{"kind", std::string(to_string(policy.kind()))}});
}

void check_policy_fits(const Policy& policy, const Cmp& cmp, const EpisodeSpec& spec) {
  if (policy.num_states() != cmp.num_states() || policy.num_actions() != cmp.num_actions())
    throw Error(ErrorKind::FeatureMismatch, "policy dimensions do not match the CMP",
                {{"policy_states", policy.num_states()}, {"policy_actions", policy.num_actions()},
                 {"cmp_states", cmp.num_states()}, {"cmp_actions", cmp.num_actions()}});
  const bool bound = policy.kind() == PolicyKind::MarkovTimeVarying || policy.kind() == PolicyKind::NonMarkovCount;
  if (bound && policy.horizon() != spec.horizon)
    throw Error(ErrorKind::HorizonMismatch, "policy was built for a different horizon",
                {{"policy_horizon", policy.horizon()}, {"horizon", spec.horizon}});
}

}  // namespace maxent
