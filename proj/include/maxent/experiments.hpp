#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "maxent/cmp.hpp"
#include "maxent/markov_opt.hpp"
#include "maxent/mcts.hpp"
#include "maxent/regret.hpp"

namespace maxent {

struct ExperimentConfig {
  std::string env = "three_state";  // preset name or CMP JSON path
  nlohmann::json env_params = nlohmann::json::object();
  int horizon = 9;
  int runs = 100;
  double ci_level = 0.95;
  std::uint64_t seed = 0;
  MarkovClass markov_class = MarkovClass::Stationary;
  OptimizeMethod method = OptimizeMethod::Cem;
  OptimizeOptions optimize;
  std::filesystem::path out;

  void validate() const;
};

/// Preset by name, otherwise a CMP file. The result passes validate_cmp.
Cmp load_env(const std::string& env, const nlohmann::json& params = nlohmann::json::object());

/// Per-policy slice of a comparison.
struct PolicyRun {
  std::string name;
  double exact = 0.0;
  MeanCi entropy;
  std::vector<double> episode_entropy;
  std::vector<double> visit_mean;  // per state
  std::vector<double> visit_ci;    // per state
};

struct CompareResult {
  nlohmann::json summary;
  PolicyRun non_markov;
  PolicyRun markov;
};

/// Solves for the optimal non-Markovian policy and the optimized Markov
/// baseline, evaluates both exactly and over `runs` seeded episodes, and
/// writes summary.json, entropy_hist.csv, visit_freq.csv, policy_non_markov.json
/// and policy_markov.json into config.out. On failure nothing written by
/// this call is left behind.
CompareResult run_compare(const ExperimentConfig& config);

/// Histogram of realized entropies rounded to 6 decimals, as
/// policy,entropy_value,frequency rows.
void write_entropy_hist(std::ostream& out, const std::vector<const PolicyRun*>& runs);
void write_visit_freq(std::ostream& out, const std::vector<const PolicyRun*>& runs);

/// Every positive-probability prefix of 1..max_states states under some
/// action sequence, in lexicographic order.
std::vector<History> feasible_prefixes(const Cmp& cmp, int max_states);

enum class RegretPolicy { Markov, NonMarkov };

/// One RegretReport per prefix. Bounds always refer to the optimized Markov
/// baseline; the regret column belongs to `regret_policy`. Writes
/// regret.csv to config.out when it is set.
std::vector<RegretReport> run_regret_sweep(const ExperimentConfig& config, const std::vector<History>& prefixes,
                                           RegretPolicy regret_policy = RegretPolicy::Markov);

/// t,H_star,H_second,H_worst,regret,lower,upper,variance_term,prob_opt; NA
/// marks undefined entries.
void write_regret_csv(std::ostream& out, const std::vector<RegretReport>& reports);

/// Episodes seeded seed, seed + 1, ...; independent episodes run in parallel.
std::vector<MctsEpisode> run_mcts_episodes(const Cmp& cmp, const EpisodeSpec& spec, const SearchConfig& search,
                                           int episodes, std::uint64_t seed, Execution execution = Execution::Parallel);

}  // namespace maxent
