#include <doctest.h>

#include <cmath>
#include <algorithm>
#include <random>

#include "maxent/error.hpp"
#include "maxent/mcts.hpp"
#include "maxent/nm_solver.hpp"
#include "maxent/presets.hpp"
#include "support/brute_force.hpp"

using namespace maxent;

namespace {

Cmp three_cycle() { return Cmp(3, 1, {0, 1, 0, 0, 0, 1, 1, 0, 0}, {1, 0, 0}); }

VisitCounts counts_of(const std::string& prefix, int S, int T) { return VisitCounts::of(parse_history(prefix), S, T); }

/// Deterministic random CMP: each (s, a) has a single successor.
Cmp random_deterministic(std::mt19937_64& rng, int S, int A) {
  std::vector<double> p(static_cast<std::size_t>(S * A * S), 0.0);
  std::uniform_int_distribution<int> pick(0, S - 1);
  for (int i = 0; i < S * A; ++i) p[static_cast<std::size_t>(i * S + pick(rng))] = 1.0;
  std::vector<double> mu(static_cast<std::size_t>(S), 0.0);
  mu[0] = 1.0;
  return Cmp(S, A, p, mu);
}

}  // namespace

TEST_SUITE("mcts") {
  TEST_CASE("single action") {
    for (int budget : {1, 10, 500}) {
      SearchConfig cfg;
      cfg.budget = budget;
      const auto res = plan_action(three_cycle(), {6, {}}, counts_of("0", 3, 6), 0, cfg);
      CHECK(res.action == 0);
    }
  }

  TEST_CASE("root statistics") {
    SearchConfig cfg;
    cfg.budget = 777;
    cfg.seed = 4;
    const auto res = plan_action(river_swim(), {8, {}}, counts_of("0,1,1", 3, 8), 1, cfg);
    int visits = 0;
    for (const auto& c : res.root.children) {
      visits += c.visits;
      CHECK(c.mean() >= 0.0);
      CHECK(c.mean() <= std::log(3.0) + 1e-12);
    }
    CHECK(visits == 777);
    CHECK(res.root.visits == 777);
    const auto j = res.root.to_json();
    CHECK(j["children"].size() == 2);
  }

  TEST_CASE("depth cut keeps values in range") {
    SearchConfig cfg;
    cfg.budget = 300;
    cfg.max_depth = 2;
    const Cmp two(2, 2, {1, 0, 0, 1, 1, 0, 0, 1}, {1, 0});
    const auto res = plan_action(two, {10, {}}, counts_of("0", 2, 10), 0, cfg);
    for (const auto& c : res.root.children) {
      CHECK(c.mean() >= 0.0);
      CHECK(c.mean() <= std::log(2.0) + 1e-12);
    }
  }

  TEST_CASE("seeded determinism") {
    SearchConfig cfg;
    cfg.budget = 2000;
    cfg.seed = 17;
    const auto a = plan_action(river_swim(), {9, {}}, counts_of("0", 3, 9), 0, cfg);
    const auto b = plan_action(river_swim(), {9, {}}, counts_of("0", 3, 9), 0, cfg);
    CHECK(a.action == b.action);
    CHECK(a.root.to_json() == b.root.to_json());
    const auto e1 = rollout_episode_with_mcts(river_swim(), {9, {}}, cfg, 5);
    const auto e2 = rollout_episode_with_mcts(river_swim(), {9, {}}, cfg, 5);
    CHECK(e1.history.states == e2.history.states);
    CHECK(e1.entropy == e2.entropy);
  }

  TEST_CASE("large budgets on small deterministic trees match the exact solver") {
    std::mt19937_64 rng(71);
    int checked = 0;
    for (int trial = 0; trial < 30; ++trial) {
      const auto cmp = random_deterministic(rng, 3, 2);
      const int T = 5;
      const auto sol = solve_non_markovian(cmp, {T, {}});
      const Policy nm(sol.policy);
      // Walk the optimal trajectory; at every node with T - t <= 4, the
      // planner must pick an optimal action.
      bf::Path path{{0}, {}, 1.0};
      while (static_cast<int>(path.states.size()) < T) {
        const auto counts = VisitCounts::of({path.states, path.actions, {}}, 3, T);
        const auto* entry = sol.values.find(counts.counts, path.states.back());
        REQUIRE(entry != nullptr);
        SearchConfig cfg;
        cfg.budget = 20'000;
        const int a = plan_action(cmp, {T, {}}, counts, path.states.back(), cfg).action;
        CHECK(std::find(entry->argmax.begin(), entry->argmax.end(), a) != entry->argmax.end());
        if (entry->argmax.size() == 1) {
          CHECK(a == sol.policy.action(entry->key));
          ++checked;
        }
        int next = 0;
        while (cmp.p(path.states.back(), entry->argmax.front(), next) != 1.0) ++next;
        path.actions.push_back(entry->argmax.front());
        path.states.push_back(next);
      }
    }
    CHECK(checked > 10);
  }

  TEST_CASE("errors and liveness") {
    SearchConfig cfg;
    cfg.budget = 0;
    try {
      plan_action(three_state(), {3, {}}, counts_of("0", 3, 3), 0, cfg);
      FAIL("expected BudgetZero");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::BudgetZero);
    }
    cfg.budget = 10;
    try {
      plan_action(three_state(), {3, {}}, counts_of("0,0,1,1,0", 3, 3), 0, cfg);
      FAIL("expected EpisodeFinished");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::EpisodeFinished);
    }
    cfg.budget = 1;
    const auto ep = rollout_episode_with_mcts(river_swim(), {8, {}}, cfg, 3);
    CHECK(ep.history.states.size() == 8);
    CHECK_NOTHROW(check_history(river_swim(), ep.history));
    CHECK(ep.entropy == bf::entropy_of_states(ep.history.states, 3));
  }

  TEST_CASE("forced chain episode") {
    SearchConfig cfg;
    cfg.budget = 5;
    const auto ep = rollout_episode_with_mcts(three_cycle(), {4, {}}, cfg, 0);
    CHECK(ep.history.states == std::vector<int>{0, 1, 2, 0});
    CHECK(ep.entropy == doctest::Approx(bf::entropy_of_states({0, 1, 2, 0}, 3)));
  }
}
