#include <benchmark/benchmark.h>

#include "maxent/experiments.hpp"
#include "maxent/markov_opt.hpp"
#include "maxent/monte_carlo.hpp"
#include "maxent/presets.hpp"

using namespace maxent;

namespace {

Execution mode(const benchmark::State& state) { return state.range(0) ? Execution::Parallel : Execution::Serial; }

void BM_Rollouts(benchmark::State& state) {
  const Cmp cmp = river_swim();
  const EpisodeSpec spec{10, std::nullopt};
  const Policy policy(MarkovStationaryPolicy::uniform(3, 2));
  for (auto _ : state) {
    auto batch = rollout_batch(cmp, policy, spec, 100'000, 7, mode(state));
    benchmark::DoNotOptimize(batch.entropies.data());
  }
  state.SetItemsProcessed(state.iterations() * 100'000);
}
BENCHMARK(BM_Rollouts)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_StationaryGrid(benchmark::State& state) {
  const Cmp cmp = three_state();
  const MarkovObjective objective(cmp, {9, std::nullopt}, MarkovClass::Stationary);
  for (auto _ : state) {
    auto best = grid_search(objective, 51, mode(state));
    benchmark::DoNotOptimize(best.value);
  }
  state.SetItemsProcessed(state.iterations() * 51 * 51 * 51);
}
BENCHMARK(BM_StationaryGrid)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_MctsEpisodes(benchmark::State& state) {
  const Cmp cmp = three_state();
  const EpisodeSpec spec{9, std::nullopt};
  SearchConfig search;
  search.budget = 2'000;
  for (auto _ : state) {
    auto episodes = run_mcts_episodes(cmp, spec, search, 8, 3, mode(state));
    benchmark::DoNotOptimize(episodes.data());
  }
}
BENCHMARK(BM_MctsEpisodes)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
