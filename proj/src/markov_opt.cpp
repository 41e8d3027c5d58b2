#include "maxent/markov_opt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "maxent/error.hpp"
#include "maxent/evaluation.hpp"
#include "maxent/rng.hpp"

namespace maxent {

double exact_markov_objective(const Cmp& cmp, const Policy& policy, const EpisodeSpec& spec, std::uint64_t node_cap) {
  if (!policy.is_markov())
    throw Error(ErrorKind::PolicyClassMismatch, "exact_markov_objective takes Markov policies only",
                {{"kind", std::string(to_string(policy.kind()))}});
  ExactOptions options;
  options.node_cap = node_cap;
  return exact_expected_entropy(cmp, policy, spec, options);
}

MarkovObjective::MarkovObjective(const Cmp& cmp, const EpisodeSpec& spec, MarkovClass cls, std::uint64_t node_cap)
    : graph_(CountGraph::from_initial(cmp, spec.horizon, node_cap)),
      class_(cls),
      S_(cmp.num_states()),
      A_(cmp.num_actions()),
      horizon_(spec.horizon),
      num_rules_(cls == MarkovClass::Stationary ? 1 : static_cast<std::size_t>(std::max(spec.horizon - 1, 1))) {
  terminal_entropy_.assign(graph_.size(), 0.0);
  for (std::size_t i = 0; i < graph_.size(); ++i)
    if (graph_.terminal(i)) terminal_entropy_[i] = graph_.codec().entropy(graph_.key(i));
}

double MarkovObjective::operator()(std::span<const double> tables, std::vector<double>& mass) const {
  mass.assign(graph_.size(), 0.0);
  for (const auto& r : graph_.roots()) mass[r.node] += r.mass;
  const auto A = static_cast<std::size_t>(A_);
  double value = 0.0;
  for (std::size_t i = 0; i < graph_.size(); ++i) {
    const double m = mass[i];
    if (m == 0.0) continue;
    if (graph_.terminal(i)) {
      value += m * terminal_entropy_[i];
      continue;
    }
    const std::size_t rule = class_ == MarkovClass::Stationary ? 0 : static_cast<std::size_t>(graph_.depth(i) - 1);
    const double* row = tables.data() + (rule * static_cast<std::size_t>(S_) + static_cast<std::size_t>(graph_.state(i))) * A;
    for (std::size_t a = 0; a < A; ++a) {
      const double w = m * row[a];
      if (w == 0.0) continue;
      for (const auto& e : graph_.edges(i, static_cast<int>(a))) mass[e.target] += w * e.prob;
    }
  }
  return value;
}

Policy MarkovObjective::make_policy(std::vector<double> tables) const {
  if (class_ == MarkovClass::Stationary) return Policy(MarkovStationaryPolicy(S_, A_, std::move(tables)), horizon_);
  if (horizon_ == 1) tables.clear();
  return Policy(MarkovTimeVaryingPolicy(S_, A_, horizon_, std::move(tables)));
}

std::size_t free_parameters(const Cmp& cmp, const EpisodeSpec& spec, MarkovClass cls) {
  const std::size_t rules = cls == MarkovClass::Stationary ? 1 : static_cast<std::size_t>(std::max(spec.horizon - 1, 0));
  return rules * static_cast<std::size_t>(cmp.num_states()) * static_cast<std::size_t>(cmp.num_actions() - 1);
}

namespace {

// All rows (k_0, ..., k_{A-1}) / (r - 1) with sum k = r - 1, k_0 descending.
std::vector<std::vector<double>> simplex_grid(int num_actions, int resolution) {
  std::vector<std::vector<double>> out;
  std::vector<int> k(static_cast<std::size_t>(num_actions), 0);
  const int total = resolution - 1;
  auto rec = [&](auto&& self, int pos, int left) -> void {
    if (pos == num_actions - 1) {
      k[static_cast<std::size_t>(pos)] = left;
      std::vector<double> row(k.size());
      for (std::size_t i = 0; i < k.size(); ++i) row[i] = total == 0 ? 1.0 / num_actions : static_cast<double>(k[i]) / total;
      out.push_back(std::move(row));
      return;
    }
    for (int v = left; v >= 0; --v) {
      k[static_cast<std::size_t>(pos)] = v;
      self(self, pos + 1, left - v);
    }
  };
  rec(rec, 0, total);
  return out;
}

double grid_size(const MarkovObjective& objective, int resolution, std::size_t points_per_row) {
  (void)resolution;
  const double rows = static_cast<double>(objective.num_rules()) * objective.num_states();
  return std::pow(static_cast<double>(points_per_row), rows);
}

void fill_grid_point(const std::vector<std::vector<double>>& rows, std::size_t num_rows, std::uint64_t index,
                     std::vector<double>& tables) {
  const auto per_row = static_cast<std::uint64_t>(rows.size());
  const std::size_t A = rows.front().size();
  tables.resize(num_rows * A);
  for (std::size_t r = 0; r < num_rows; ++r) {
    const auto& row = rows[static_cast<std::size_t>(index % per_row)];
    index /= per_row;
    std::copy(row.begin(), row.end(), tables.begin() + static_cast<std::ptrdiff_t>(r * A));
  }
}

struct Candidate {
  double value;
  std::uint64_t index;
};

bool better(const Candidate& l, const Candidate& r) {
  return l.value > r.value || (l.value == r.value && l.index < r.index);
}

GridBest grid_serial(const MarkovObjective& objective, const std::vector<std::vector<double>>& rows,
                     std::uint64_t total) {
  const std::size_t num_rows = objective.num_rules() * static_cast<std::size_t>(objective.num_states());
  std::vector<double> tables;
  std::vector<double> scratch;
  Candidate best{-1.0, 0};
  double sum = 0.0;
  for (std::uint64_t i = 0; i < total; ++i) {
    fill_grid_point(rows, num_rows, i, tables);
    const Candidate c{objective(tables, scratch), i};
    sum += c.value;
    if (better(c, best)) best = c;
  }
  return {best.index, best.value, sum / static_cast<double>(total)};
}

GridBest grid_parallel(const MarkovObjective& objective, const std::vector<std::vector<double>>& rows,
                       std::uint64_t total) {
  constexpr std::uint64_t kBlock = 4096;
  const std::size_t num_rows = objective.num_rules() * static_cast<std::size_t>(objective.num_states());
  const auto blocks = static_cast<std::int64_t>((total + kBlock - 1) / kBlock);
  std::vector<Candidate> block_best(static_cast<std::size_t>(blocks), Candidate{-1.0, 0});
  std::vector<double> block_sum(static_cast<std::size_t>(blocks), 0.0);
#if defined(MAXENT_HAVE_OPENMP)
#pragma omp parallel
#endif
  {
    std::vector<double> tables;
    std::vector<double> scratch;
#if defined(MAXENT_HAVE_OPENMP)
#pragma omp for schedule(dynamic)
#endif
    for (std::int64_t b = 0; b < blocks; ++b) {
      const auto first = static_cast<std::uint64_t>(b) * kBlock;
      const auto last = std::min(total, first + kBlock);
      Candidate best{-1.0, 0};
      double sum = 0.0;
      for (auto i = first; i < last; ++i) {
        fill_grid_point(rows, num_rows, i, tables);
        const Candidate c{objective(tables, scratch), i};
        sum += c.value;
        if (better(c, best)) best = c;
      }
      block_best[static_cast<std::size_t>(b)] = best;
      block_sum[static_cast<std::size_t>(b)] = sum;
    }
  }
  // Blocks reduce in index order; ties resolve to the lowest grid index as in
  // the serial kernel.
  Candidate best{-1.0, 0};
  double sum = 0.0;
  for (std::size_t b = 0; b < block_best.size(); ++b) {
    sum += block_sum[b];
    if (better(block_best[b], best)) best = block_best[b];
  }
  return {best.index, best.value, sum / static_cast<double>(total)};
}

double standard_normal(Rng& rng) {
  // Box-Muller on the portable uniform draw.
  const double u1 = 1.0 - uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

void softmax_rows(std::span<const double> logits, std::size_t A, std::vector<double>& out) {
  out.resize(logits.size());
  for (std::size_t r = 0; r < logits.size(); r += A) {
    const double top = *std::max_element(logits.begin() + static_cast<std::ptrdiff_t>(r),
                                         logits.begin() + static_cast<std::ptrdiff_t>(r + A));
    double sum = 0.0;
    for (std::size_t a = 0; a < A; ++a) sum += out[r + a] = std::exp(logits[r + a] - top);
    for (std::size_t a = 0; a < A; ++a) out[r + a] /= sum;
  }
}

void evaluate_population(const MarkovObjective& objective, const std::vector<std::vector<double>>& logits,
                         std::vector<double>& values, Execution execution) {
  const auto A = static_cast<std::size_t>(objective.num_actions());
  const auto n = static_cast<std::int64_t>(logits.size());
  values.assign(logits.size(), 0.0);
  if (execution == Execution::Serial) {
    std::vector<double> tables;
    std::vector<double> scratch;
    for (std::int64_t i = 0; i < n; ++i) {
      softmax_rows(logits[static_cast<std::size_t>(i)], A, tables);
      values[static_cast<std::size_t>(i)] = objective(tables, scratch);
    }
    return;
  }
#if defined(MAXENT_HAVE_OPENMP)
#pragma omp parallel
#endif
  {
    std::vector<double> tables;
    std::vector<double> scratch;
#if defined(MAXENT_HAVE_OPENMP)
#pragma omp for schedule(static)
#endif
    for (std::int64_t i = 0; i < n; ++i) {
      softmax_rows(logits[static_cast<std::size_t>(i)], A, tables);
      values[static_cast<std::size_t>(i)] = objective(tables, scratch);
    }
  }
}

OptimizeResult run_grid(const MarkovObjective& objective, const OptimizeOptions& options, std::size_t free) {
  if (free > 6) throw Error(ErrorKind::TooManyParamsForGrid, "grid search supports at most 6 free parameters", {{"free_parameters", free}});
  if (options.grid_resolution < 2) throw Error(ErrorKind::InvalidArgument, "grid resolution must be at least 2");
  const auto rows = simplex_grid(objective.num_actions(), options.grid_resolution);
  const double total = grid_size(objective, options.grid_resolution, rows.size());
  if (total > options.max_evaluations)
    throw Error(ErrorKind::BudgetExceeded, "grid exceeds the evaluation budget",
                {{"grid_points", total}, {"max_evaluations", options.max_evaluations}});
  const auto n = static_cast<std::uint64_t>(total);
  const auto best = grid_search(objective, options.grid_resolution, options.execution);
  OptimizeResult result{objective.make_policy(grid_point(objective, options.grid_resolution, best.index)), best.value, {}, n};
  result.trace.push_back({0, 0, best.value, best.mean});
  return result;
}

OptimizeResult run_cem(const MarkovObjective& objective, const OptimizeOptions& options, std::uint64_t seed) {
  if (options.population < 2 || options.iterations < 1 || options.restarts < 1)
    throw Error(ErrorKind::InvalidArgument, "CEM needs population >= 2, iterations >= 1, restarts >= 1");
  const double budget = static_cast<double>(options.population + 1) * options.iterations * options.restarts;
  if (budget > options.max_evaluations)
    throw Error(ErrorKind::BudgetExceeded, "CEM run exceeds the evaluation budget",
                {{"evaluations", budget}, {"max_evaluations", options.max_evaluations}});
  const auto A = static_cast<std::size_t>(objective.num_actions());
  const std::size_t dim = objective.table_size();
  const auto elites = static_cast<std::size_t>(
      std::clamp(static_cast<int>(std::ceil(options.elite_fraction * options.population)), 1, options.population));

  std::vector<double> best_logits(dim, 0.0);
  std::vector<double> tables;
  softmax_rows(best_logits, A, tables);
  double best_value = objective(tables);
  OptimizeResult result{objective.make_policy(tables), best_value, {}, 1};

  std::vector<std::vector<double>> population(static_cast<std::size_t>(options.population) + 1, std::vector<double>(dim));
  std::vector<double> values;
  std::vector<std::size_t> order;
  for (int restart = 0; restart < options.restarts; ++restart) {
    auto rng = stream_rng(seed, static_cast<std::uint64_t>(restart));
    std::vector<double> mean(dim, 0.0);
    std::vector<double> sd(dim, options.initial_std);
    if (restart > 0)
      for (auto& m : mean) m = options.initial_std * standard_normal(rng);
    for (int it = 0; it < options.iterations; ++it) {
      for (int i = 0; i < options.population; ++i)
        for (std::size_t j = 0; j < dim; ++j)
          population[static_cast<std::size_t>(i)][j] = mean[j] + sd[j] * standard_normal(rng);
      population.back() = mean;  // the current mean competes too
      evaluate_population(objective, population, values, options.execution);
      result.evaluations += population.size();

      order.resize(population.size());
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](auto l, auto r) { return values[l] > values[r]; });
      if (values[order.front()] > best_value) {
        best_value = values[order.front()];
        best_logits = population[order.front()];
      }
      double pop_mean = 0.0;
      for (double v : values) pop_mean += v;
      pop_mean /= static_cast<double>(values.size());
      result.trace.push_back({restart, it, best_value, pop_mean});

      for (std::size_t j = 0; j < dim; ++j) {
        double m = 0.0;
        for (std::size_t e = 0; e < elites; ++e) m += population[order[e]][j];
        m /= static_cast<double>(elites);
        double var = 0.0;
        for (std::size_t e = 0; e < elites; ++e) var += (population[order[e]][j] - m) * (population[order[e]][j] - m);
        mean[j] = m;
        sd[j] = std::sqrt(var / static_cast<double>(elites));
      }
    }
  }
  softmax_rows(best_logits, A, tables);
  result.policy = objective.make_policy(tables);
  result.value = best_value;
  return result;
}

}  // namespace

GridBest grid_search(const MarkovObjective& objective, int resolution, Execution execution) {
  const auto rows = simplex_grid(objective.num_actions(), resolution);
  const auto total = static_cast<std::uint64_t>(grid_size(objective, resolution, rows.size()));
  return execution == Execution::Serial ? grid_serial(objective, rows, total) : grid_parallel(objective, rows, total);
}

std::vector<double> grid_point(const MarkovObjective& objective, int resolution, std::uint64_t index) {
  const auto rows = simplex_grid(objective.num_actions(), resolution);
  std::vector<double> tables;
  fill_grid_point(rows, objective.num_rules() * static_cast<std::size_t>(objective.num_states()), index, tables);
  return tables;
}

OptimizeResult optimize_markov(const Cmp& cmp, const EpisodeSpec& spec, MarkovClass cls, OptimizeMethod method,
                               const OptimizeOptions& options, std::uint64_t seed) {
  spec.validate();
  require_valid(cmp);
  const MarkovObjective objective(cmp, spec, cls, options.node_cap);
  const auto free = free_parameters(cmp, spec, cls);
  if (method == OptimizeMethod::Grid) return run_grid(objective, options, free);
  return run_cem(objective, options, seed);
}

}  // namespace maxent
