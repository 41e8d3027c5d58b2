#include "maxent/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <sstream>

#include "maxent/cmp_io.hpp"
#include "maxent/distributions.hpp"
#include "maxent/error.hpp"
#include "maxent/markovianize.hpp"
#include "maxent/monte_carlo.hpp"
#include "maxent/nm_solver.hpp"
#include "maxent/policy_io.hpp"
#include "maxent/presets.hpp"

namespace maxent {
namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string g17(double v) { return fmt("%.17g", v); }

PolicyRun evaluate_run(const std::string& name, double exact, const Cmp& cmp, const Policy& policy,
                       const EpisodeSpec& spec, const ExperimentConfig& config) {
  PolicyRun run;
  run.name = name;
  run.exact = exact;
  const auto batch = rollout_batch(cmp, policy, spec, static_cast<std::size_t>(config.runs), config.seed,
                                   config.optimize.execution);
  run.episode_entropy = batch.entropies;
  run.entropy = mean_ci(batch.entropies, config.ci_level);
  const auto S = static_cast<std::size_t>(cmp.num_states());
  std::vector<double> column(static_cast<std::size_t>(config.runs));
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t i = 0; i < column.size(); ++i) column[i] = batch.visit_frequency[i * S + s];
    const auto stats = mean_ci(column, config.ci_level);
    run.visit_mean.push_back(stats.mean);
    run.visit_ci.push_back(stats.ci_halfwidth);
  }
  return run;
}

double l1_to_uniform(const std::vector<double>& p) {
  const double u = 1.0 / static_cast<double>(p.size());
  double d = 0.0;
  for (double x : p) d += std::abs(x - u);
  return d;
}

nlohmann::json run_json(const PolicyRun& run, double infinite_marginal) {
  return {{"exact_expected_entropy", run.exact},
          {"infinite_sample_entropy_marginal", infinite_marginal},
          {"mc_mean", run.entropy.mean},
          {"mc_ci_halfwidth", run.entropy.ci_halfwidth},
          {"mc_std_error", run.entropy.std_error},
          {"mean_visit_frequency", run.visit_mean},
          {"visit_l1_to_uniform", l1_to_uniform(run.visit_mean)}};
}

/// Writes files into a directory and removes them again unless commit() is
/// reached.
class OutputSet {
 public:
  explicit OutputSet(std::filesystem::path dir) : dir_(std::move(dir)) {
    if (!std::filesystem::exists(dir_)) {
      std::error_code ec;
      std::filesystem::create_directories(dir_, ec);
      if (ec) throw Error(ErrorKind::Io, "cannot create output directory", {{"path", dir_.string()}, {"reason", ec.message()}});
      created_dir_ = true;
    }
  }
  OutputSet(const OutputSet&) = delete;
  OutputSet& operator=(const OutputSet&) = delete;
  ~OutputSet() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& f : written_) std::filesystem::remove(f, ec);
    if (created_dir_) std::filesystem::remove(dir_, ec);
  }

  void write(const std::string& name, const std::string& content) {
    const auto path = dir_ / name;
    written_.push_back(path);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    out.close();
    if (!out) throw Error(ErrorKind::Io, "failed to write output file", {{"path", path.string()}});
  }
  void commit() { committed_ = true; }

 private:
  std::filesystem::path dir_;
  std::vector<std::filesystem::path> written_;
  bool created_dir_ = false;
  bool committed_ = false;
};

std::string optimize_method_name(OptimizeMethod m) { return m == OptimizeMethod::Grid ? "grid" : "cem"; }
std::string markov_class_name(MarkovClass c) { return c == MarkovClass::Stationary ? "stationary" : "time_varying"; }

}  // namespace

void ExperimentConfig::validate() const {
  if (horizon < 1) throw Error(ErrorKind::InvalidArgument, "horizon must be at least 1", {{"horizon", horizon}});
  if (runs < 1) throw Error(ErrorKind::InvalidArgument, "runs must be at least 1", {{"runs", runs}});
  if (!(ci_level > 0.0 && ci_level < 1.0))
    throw Error(ErrorKind::InvalidArgument, "ci_level must lie in (0,1)", {{"ci_level", ci_level}});
}

Cmp load_env(const std::string& env, const nlohmann::json& params) {
  if (is_preset(env)) return build_preset(env, params);
  if (!params.empty()) throw Error(ErrorKind::BadParams, "parameters only apply to presets", {{"env", env}});
  if (!std::filesystem::exists(env)) throw Error(ErrorKind::UnknownPreset, "not a preset name or an existing CMP file", {{"env", env}});
  return load_cmp(env);
}

void write_entropy_hist(std::ostream& out, const std::vector<const PolicyRun*>& runs) {
  out << "policy,entropy_value,frequency\n";
  for (const auto* run : runs) {
    // Bucket on the printed value so equal rows cannot appear twice.
    std::map<double, int> buckets;
    for (double h : run->episode_entropy) ++buckets[std::stod(fmt("%.6f", h))];
    const double n = static_cast<double>(run->episode_entropy.size());
    for (const auto& [value, count] : buckets)
      out << run->name << ',' << fmt("%.6f", value) << ',' << g17(count / n) << '\n';
  }
}

void write_visit_freq(std::ostream& out, const std::vector<const PolicyRun*>& runs) {
  out << "policy,state,mean_freq,ci_halfwidth\n";
  for (const auto* run : runs)
    for (std::size_t s = 0; s < run->visit_mean.size(); ++s)
      out << run->name << ',' << s << ',' << g17(run->visit_mean[s]) << ',' << g17(run->visit_ci[s]) << '\n';
}

CompareResult run_compare(const ExperimentConfig& config) {
  config.validate();
  const Cmp cmp = load_env(config.env, config.env_params);
  const EpisodeSpec spec{config.horizon, std::nullopt};

  const auto nm = solve_non_markovian(cmp, spec, std::nullopt, config.optimize.node_cap);
  const Policy nm_policy(nm.policy);
  const auto opt = optimize_markov(cmp, spec, config.markov_class, config.method, config.optimize, config.seed);

  CompareResult result;
  result.non_markov = evaluate_run("non_markov", nm.values.optimal_value(), cmp, nm_policy, spec, config);
  result.markov = evaluate_run("markov", opt.value, cmp, opt.policy, spec, config);

  const Policy nm_markovian(markovianize(cmp, nm_policy, spec, {config.optimize.node_cap}));
  const double nm_inf = infinite_sample_entropy(cmp, nm_markovian, spec, InfiniteKind::Marginal);
  const double m_inf = infinite_sample_entropy(cmp, opt.policy, spec, InfiniteKind::Marginal);

  auto& summary = result.summary;
  summary["env"] = config.env;
  summary["env_params"] = config.env_params;
  summary["horizon"] = config.horizon;
  summary["runs"] = config.runs;
  summary["seed"] = config.seed;
  summary["ci_level"] = config.ci_level;
  summary["non_markov"] = run_json(result.non_markov, nm_inf);
  summary["markov"] = run_json(result.markov, m_inf);
  summary["markov"]["class"] = markov_class_name(config.markov_class);
  summary["markov"]["method"] = optimize_method_name(config.method);
  summary["markov"]["evaluations"] = opt.evaluations;
  summary["exact_gap"] = result.non_markov.exact - result.markov.exact;

  if (!config.out.empty()) {
    OutputSet files(config.out);
    std::ostringstream hist, visits;
    const std::vector<const PolicyRun*> runs = {&result.non_markov, &result.markov};
    write_entropy_hist(hist, runs);
    write_visit_freq(visits, runs);
    files.write("summary.json", summary.dump(2) + "\n");
    files.write("entropy_hist.csv", hist.str());
    files.write("visit_freq.csv", visits.str());
    files.write("policy_non_markov.json", serialize_policy(nm_policy).dump(2) + "\n");
    files.write("policy_markov.json", serialize_policy(opt.policy).dump(2) + "\n");
    files.commit();
  }
  return result;
}

std::vector<History> feasible_prefixes(const Cmp& cmp, int max_states) {
  std::vector<History> out;
  std::vector<History> frontier;
  for (int s = 0; s < cmp.num_states(); ++s)
    if (cmp.initial()[static_cast<std::size_t>(s)] > 0.0) frontier.push_back({{s}, {}, std::nullopt});
  for (int len = 1; len <= max_states && !frontier.empty(); ++len) {
    out.insert(out.end(), frontier.begin(), frontier.end());
    if (len == max_states) break;
    std::vector<History> next;
    for (const auto& h : frontier)
      for (int a = 0; a < cmp.num_actions(); ++a)
        for (int s = 0; s < cmp.num_states(); ++s) {
          if (cmp.p(h.last_state(), a, s) <= 0.0) continue;
          History g = h;
          g.actions.push_back(a);
          g.states.push_back(s);
          next.push_back(std::move(g));
        }
    frontier = std::move(next);
  }
  return out;
}

std::vector<RegretReport> run_regret_sweep(const ExperimentConfig& config, const std::vector<History>& prefixes,
                                           RegretPolicy regret_policy) {
  config.validate();
  const Cmp cmp = load_env(config.env, config.env_params);
  const EpisodeSpec spec{config.horizon, std::nullopt};
  const ExactOptions exact{config.optimize.node_cap};
  const auto nm = solve_non_markovian(cmp, spec, std::nullopt, config.optimize.node_cap);
  const auto opt = optimize_markov(cmp, spec, config.markov_class, config.method, config.optimize, config.seed);
  const Policy nm_policy(nm.policy);

  std::vector<RegretReport> reports;
  for (const auto& prefix : prefixes) {
    if (static_cast<int>(prefix.states.size()) > config.horizon)
      throw Error(ErrorKind::InconsistentPrefix, "prefix is longer than the horizon", {{"prefix", format_history(prefix)}});
    auto report = regret_bounds(cmp, spec, prefix, opt.policy, nm, exact);
    if (regret_policy == RegretPolicy::NonMarkov) report.regret = regret_to_go(cmp, nm_policy, spec, prefix, exact);
    reports.push_back(std::move(report));
  }
  if (!config.out.empty()) {
    OutputSet files(config.out);
    std::ostringstream csv;
    write_regret_csv(csv, reports);
    files.write("regret.csv", csv.str());
    files.commit();
  }
  return reports;
}

void write_regret_csv(std::ostream& out, const std::vector<RegretReport>& reports) {
  auto opt = [](const std::optional<double>& v) { return v ? g17(*v) : std::string("NA"); };
  out << "t,H_star,H_second,H_worst,regret,lower,upper,variance_term,prob_opt\n";
  for (const auto& r : reports)
    out << r.t << ',' << g17(r.h_star) << ',' << opt(r.h_second) << ',' << g17(r.h_worst) << ',' << g17(r.regret) << ','
        << opt(r.lower_bound) << ',' << opt(r.upper_bound) << ',' << opt(r.variance_term) << ',' << g17(r.markov_prob_opt)
        << '\n';
}

std::vector<MctsEpisode> run_mcts_episodes(const Cmp& cmp, const EpisodeSpec& spec, const SearchConfig& search,
                                           int episodes, std::uint64_t seed, Execution execution) {
  if (episodes < 1) throw Error(ErrorKind::InvalidArgument, "need at least one episode", {{"episodes", episodes}});
  std::vector<MctsEpisode> out(static_cast<std::size_t>(episodes));
  if (execution == Execution::Serial) {
    for (int i = 0; i < episodes; ++i)
      out[static_cast<std::size_t>(i)] = rollout_episode_with_mcts(cmp, spec, search, seed + static_cast<std::uint64_t>(i));
    return out;
  }
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < episodes; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = rollout_episode_with_mcts(cmp, spec, search, seed + static_cast<std::uint64_t>(i));
    } catch (...) {
#pragma omp critical(maxent_mcts_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace maxent
