#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "maxent/cmp.hpp"
#include "maxent/count_graph.hpp"
#include "maxent/monte_carlo.hpp"
#include "maxent/policy.hpp"

namespace maxent {

/// E[H(d_h)] of a Markov policy. Exists so optimizers depend only on this
/// module; throws PolicyClassMismatch for other classes.
double exact_markov_objective(const Cmp& cmp, const Policy& policy, const EpisodeSpec& spec,
                              std::uint64_t node_cap = kDefaultNodeCap);

enum class MarkovClass { Stationary, TimeVarying };
enum class OptimizeMethod { Grid, Cem };

/// Reusable exact evaluator: the count graph is built once, then each call is
/// a forward sweep with the given decision rules. Tables are flat
/// [rule][s][a]; a stationary class has one rule, time-varying has T-1.
class MarkovObjective {
 public:
  MarkovObjective(const Cmp& cmp, const EpisodeSpec& spec, MarkovClass cls, std::uint64_t node_cap = kDefaultNodeCap);

  MarkovClass policy_class() const noexcept { return class_; }
  int num_states() const noexcept { return S_; }
  int num_actions() const noexcept { return A_; }
  std::size_t num_rules() const noexcept { return num_rules_; }
  std::size_t table_size() const noexcept { return num_rules_ * static_cast<std::size_t>(S_) * A_; }

  double operator()(std::span<const double> tables, std::vector<double>& scratch) const;
  double operator()(std::span<const double> tables) const {
    std::vector<double> scratch;
    return (*this)(tables, scratch);
  }

  Policy make_policy(std::vector<double> tables) const;

 private:
  CountGraph graph_;
  MarkovClass class_;
  int S_;
  int A_;
  int horizon_;
  std::size_t num_rules_;
  std::vector<double> terminal_entropy_;
};

struct OptimizeOptions {
  int grid_resolution = 101;  // points per free parameter
  int population = 64;
  double elite_fraction = 0.125;
  int iterations = 200;
  int restarts = 8;
  double initial_std = 1.5;
  double max_evaluations = 5e7;
  std::uint64_t node_cap = kDefaultNodeCap;
  Execution execution = Execution::Parallel;
};

struct TraceEntry {
  int restart = 0;
  int iteration = 0;
  double best_value = 0.0;        // best so far, over all restarts
  double population_mean = 0.0;   // mean objective of this iteration's samples
};

struct OptimizeResult {
  Policy policy;
  double value = 0.0;
  std::vector<TraceEntry> trace;
  std::size_t evaluations = 0;
};

/// Best Markov policy of the requested class found by an exhaustive grid
/// (<= 6 free parameters) or the cross-entropy method over row logits.
/// Deterministic given `seed`; best-so-far semantics.
OptimizeResult optimize_markov(const Cmp& cmp, const EpisodeSpec& spec, MarkovClass cls, OptimizeMethod method,
                               const OptimizeOptions& options, std::uint64_t seed);

/// Number of free parameters of the class: rules * S * (A - 1).
std::size_t free_parameters(const Cmp& cmp, const EpisodeSpec& spec, MarkovClass cls);

/// Grid kernels, exposed for the serial/parallel comparison. Returns the
/// flat index of the best grid point (ties to the lowest index) and its value.
struct GridBest {
  std::uint64_t index = 0;
  double value = -1.0;
  double mean = 0.0;
};
GridBest grid_search(const MarkovObjective& objective, int resolution, Execution execution);
std::vector<double> grid_point(const MarkovObjective& objective, int resolution, std::uint64_t index);

}  // namespace maxent
