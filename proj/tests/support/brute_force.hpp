#pragma once

// Independent reference implementations over full ordered histories. Nothing
// here uses count compression or the library's graph code.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "maxent/cmp.hpp"
#include "maxent/policy.hpp"

namespace bf {

using maxent::Cmp;

using HistoryPolicy = std::function<std::vector<double>(const std::vector<int>& states, const std::vector<int>& actions)>;

inline HistoryPolicy wrap(const maxent::Policy& p) {
  return [&p](const std::vector<int>& s, const std::vector<int>& a) { return maxent::act(p, {s, a}); };
}

inline double entropy_of_states(const std::vector<int>& states, int S) {
  std::vector<int> c(static_cast<std::size_t>(S), 0);
  for (int s : states) ++c[static_cast<std::size_t>(s)];
  double h = 0.0;
  for (int k : c)
    if (k > 0) {
      const double p = static_cast<double>(k) / states.size();
      h -= p * std::log(p);
    }
  return h;
}

struct Path {
  std::vector<int> states;
  std::vector<int> actions;
  double prob;
};

/// Every positive-probability length-T continuation of `start`, with its
/// probability conditional on the start.
inline void walk(const Cmp& cmp, const HistoryPolicy& pi, int T, Path& cur,
                 const std::function<void(const Path&)>& leaf) {
  if (static_cast<int>(cur.states.size()) == T) {
    leaf(cur);
    return;
  }
  const auto dist = pi(cur.states, cur.actions);
  const int s = cur.states.back();
  for (int a = 0; a < cmp.num_actions(); ++a) {
    if (dist[static_cast<std::size_t>(a)] <= 0.0) continue;
    for (int n = 0; n < cmp.num_states(); ++n) {
      const double p = cmp.p(s, a, n);
      if (p <= 0.0) continue;
      const double saved = cur.prob;
      cur.prob *= dist[static_cast<std::size_t>(a)] * p;
      cur.states.push_back(n);
      cur.actions.push_back(a);
      walk(cmp, pi, T, cur, leaf);
      cur.states.pop_back();
      cur.actions.pop_back();
      cur.prob = saved;
    }
  }
}

inline void histories(const Cmp& cmp, const HistoryPolicy& pi, int T, const std::function<void(const Path&)>& leaf) {
  for (int s = 0; s < cmp.num_states(); ++s) {
    const double m = cmp.initial()[static_cast<std::size_t>(s)];
    if (m <= 0.0) continue;
    Path p{{s}, {}, m};
    walk(cmp, pi, T, p, leaf);
  }
}

inline double expected_entropy(const Cmp& cmp, const HistoryPolicy& pi, int T) {
  double e = 0.0;
  histories(cmp, pi, T, [&](const Path& p) { e += p.prob * entropy_of_states(p.states, cmp.num_states()); });
  return e;
}

/// d_t(s) for t in [0, T-1] from full histories.
inline std::vector<std::vector<double>> step_distributions(const Cmp& cmp, const HistoryPolicy& pi, int T) {
  std::vector<std::vector<double>> d(static_cast<std::size_t>(T), std::vector<double>(static_cast<std::size_t>(cmp.num_states()), 0.0));
  histories(cmp, pi, T, [&](const Path& p) {
    for (int t = 0; t < T; ++t) d[static_cast<std::size_t>(t)][static_cast<std::size_t>(p.states[static_cast<std::size_t>(t)])] += p.prob;
  });
  return d;
}

/// Best expected final entropy from an ordered prefix, by backward induction
/// over ordered histories.
inline double optimum_from(const Cmp& cmp, int T, std::vector<int>& states) {
  if (static_cast<int>(states.size()) == T) return entropy_of_states(states, cmp.num_states());
  const int s = states.back();
  double best = -1.0;
  for (int a = 0; a < cmp.num_actions(); ++a) {
    double q = 0.0;
    for (int n = 0; n < cmp.num_states(); ++n) {
      const double p = cmp.p(s, a, n);
      if (p <= 0.0) continue;
      states.push_back(n);
      q += p * optimum_from(cmp, T, states);
      states.pop_back();
    }
    best = std::max(best, q);
  }
  return best;
}

inline double optimum(const Cmp& cmp, int T) {
  double v = 0.0;
  for (int s = 0; s < cmp.num_states(); ++s) {
    const double m = cmp.initial()[static_cast<std::size_t>(s)];
    if (m <= 0.0) continue;
    std::vector<int> h{s};
    v += m * optimum_from(cmp, T, h);
  }
  return v;
}

/// Distinct final entropies reachable from a prefix under any actions.
inline std::set<double> reachable_final_entropies(const Cmp& cmp, int T, std::vector<int> states) {
  std::set<double> out;
  std::function<void()> rec = [&] {
    if (static_cast<int>(states.size()) == T) {
      out.insert(entropy_of_states(states, cmp.num_states()));
      return;
    }
    const int s = states.back();
    std::set<int> next;
    for (int a = 0; a < cmp.num_actions(); ++a)
      for (int n = 0; n < cmp.num_states(); ++n)
        if (cmp.p(s, a, n) > 0.0) next.insert(n);
    for (int n : next) {
      states.push_back(n);
      rec();
      states.pop_back();
    }
  };
  rec();
  return out;
}

/// Var over histories ending in `state` at time index t (under pi) of the
/// probability pi assigns to the action set.
inline double action_variance(const Cmp& cmp, const HistoryPolicy& pi, int t, int state, const std::vector<int>& actions) {
  double mass = 0.0, first = 0.0, second = 0.0;
  histories(cmp, pi, t + 1, [&](const Path& p) {
    if (p.states.back() != state) return;
    const auto dist = pi(p.states, p.actions);
    double q = 0.0;
    for (int a : actions) q += dist[static_cast<std::size_t>(a)];
    mass += p.prob;
    first += p.prob * q;
    second += p.prob * q * q;
  });
  if (mass <= 0.0) return std::nan("");
  const double m = first / mass;
  return second / mass - m * m;
}

// ---- random instances ----

inline std::vector<double> random_simplex(std::mt19937_64& rng, int n, double zero_prob = 0.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(static_cast<std::size_t>(n));
  double sum = 0.0;
  for (auto& x : v) {
    x = u(rng) < zero_prob ? 0.0 : -std::log(1.0 - u(rng));
    sum += x;
  }
  if (sum <= 0.0) {
    v[std::uniform_int_distribution<int>(0, n - 1)(rng)] = 1.0;
    return v;
  }
  for (auto& x : v) x /= sum;
  return v;
}

inline Cmp random_cmp(std::mt19937_64& rng, int S, int A, double zero_prob = 0.3) {
  std::vector<double> p;
  for (int i = 0; i < S * A; ++i) {
    const auto row = random_simplex(rng, S, zero_prob);
    p.insert(p.end(), row.begin(), row.end());
  }
  return Cmp(S, A, std::move(p), random_simplex(rng, S, zero_prob));
}

inline maxent::MarkovStationaryPolicy random_stationary(std::mt19937_64& rng, int S, int A, double zero_prob = 0.0) {
  std::vector<double> t;
  for (int s = 0; s < S; ++s) {
    const auto row = random_simplex(rng, A, zero_prob);
    t.insert(t.end(), row.begin(), row.end());
  }
  return maxent::MarkovStationaryPolicy(S, A, std::move(t));
}

/// Random count policy with an entry at every (counts, state) node with
/// fewer than T states, found by walking ordered histories.
inline maxent::NonMarkovCountPolicy random_count_policy(std::mt19937_64& rng, const Cmp& cmp, int T, bool deterministic) {
  const int S = cmp.num_states(), A = cmp.num_actions();
  maxent::NonMarkovCountPolicy pol(S, A, T);
  std::set<std::pair<std::vector<int>, int>> seen;
  std::function<void(std::vector<int>&, int, int)> rec = [&](std::vector<int>& counts, int s, int depth) {
    if (depth == T) return;
    if (!seen.insert({counts, s}).second) return;
    if (deterministic) pol.set_action(counts, s, std::uniform_int_distribution<int>(0, A - 1)(rng));
    else pol.set_distribution(counts, s, random_simplex(rng, A, 0.3));
    for (int n = 0; n < S; ++n) {
      bool ok = false;
      for (int a = 0; a < A; ++a) ok = ok || cmp.p(s, a, n) > 0.0;
      if (!ok) continue;
      ++counts[static_cast<std::size_t>(n)];
      rec(counts, n, depth + 1);
      --counts[static_cast<std::size_t>(n)];
    }
  };
  for (int s = 0; s < S; ++s) {
    if (cmp.initial()[static_cast<std::size_t>(s)] <= 0.0) continue;
    std::vector<int> c(static_cast<std::size_t>(S), 0);
    c[static_cast<std::size_t>(s)] = 1;
    rec(c, s, 1);
  }
  return pol;
}

}  // namespace bf
