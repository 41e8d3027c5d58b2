#include "maxent/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <optional>

#include <CLI11.hpp>

#include "maxent/cmp_io.hpp"
#include "maxent/error.hpp"
#include "maxent/evaluation.hpp"
#include "maxent/experiments.hpp"
#include "maxent/monte_carlo.hpp"
#include "maxent/nm_solver.hpp"
#include "maxent/policy_io.hpp"

namespace maxent {
namespace {

struct Common {
  std::string env = "three_state";
  std::optional<double> advance, stay, back, slip;
  int horizon = 9;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::uint64_t node_cap = kDefaultNodeCap;
  bool serial = false;
};

struct OptimizerFlags {
  std::string cls = "stationary";
  std::string method = "cem";
  int grid_res = 101;
  int iterations = 200;
  int population = 64;
  int restarts = 8;
};

void add_env(CLI::App* cmd, Common& c) {
  cmd->add_option("--env", c.env, "Preset name (three_state, river_swim) or CMP JSON path")->capture_default_str();
  cmd->add_option("--slip", c.slip, "three_state: probability that a move fails");
  cmd->add_option("--advance", c.advance, "river_swim: probability that right advances");
  cmd->add_option("--stay", c.stay, "river_swim: probability that right stays");
  cmd->add_option("--back", c.back, "river_swim: probability that right slips back");
}

void add_episode(CLI::App* cmd, Common& c) {
  cmd->add_option("--horizon", c.horizon, "Episode length T in states")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--seed", c.seed, "Master seed (default: $MAXENT_SEED, else 0)");
  cmd->add_option("--node-cap", c.node_cap, "Maximum count-graph nodes")->capture_default_str();
  cmd->add_flag("--serial", c.serial, "Run kernels on one thread");
}

void add_optimizer(CLI::App* cmd, OptimizerFlags& o) {
  cmd->add_option("--class", o.cls, "Markov class")->check(CLI::IsMember({"stationary", "time_varying"}))->capture_default_str();
  cmd->add_option("--method", o.method, "Markov optimizer")->check(CLI::IsMember({"grid", "cem"}))->capture_default_str();
  cmd->add_option("--grid-res", o.grid_res, "Grid points per free parameter")->check(CLI::Range(2, 1'000'000))->capture_default_str();
  cmd->add_option("--iterations", o.iterations, "CEM iterations")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--population", o.population, "CEM population")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--restarts", o.restarts, "CEM restarts")->check(CLI::PositiveNumber)->capture_default_str();
}

nlohmann::json env_params(const Common& c) {
  nlohmann::json p = nlohmann::json::object();
  if (c.slip) p["slip"] = *c.slip;
  if (c.advance) p["advance"] = *c.advance;
  if (c.stay) p["stay"] = *c.stay;
  if (c.back) p["back"] = *c.back;
  return p;
}

std::uint64_t resolve_seed(const Common& c) {
  if (c.seed) return *c.seed;
  if (const char* env = std::getenv("MAXENT_SEED")) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::logic_error&) {
    }
    throw CLI::ValidationError("MAXENT_SEED", "must be a nonnegative integer");
  }
  return 0;
}

ExperimentConfig make_config(const Common& c, const OptimizerFlags& o) {
  ExperimentConfig cfg;
  cfg.env = c.env;
  cfg.env_params = env_params(c);
  cfg.horizon = c.horizon;
  cfg.seed = resolve_seed(c);
  cfg.out = c.out;
  cfg.markov_class = o.cls == "stationary" ? MarkovClass::Stationary : MarkovClass::TimeVarying;
  cfg.method = o.method == "grid" ? OptimizeMethod::Grid : OptimizeMethod::Cem;
  cfg.optimize.grid_resolution = o.grid_res;
  cfg.optimize.iterations = o.iterations;
  cfg.optimize.population = o.population;
  cfg.optimize.restarts = o.restarts;
  cfg.optimize.node_cap = c.node_cap;
  cfg.optimize.execution = c.serial ? Execution::Serial : Execution::Parallel;
  return cfg;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f << content;
  f.close();
  if (!f) throw Error(ErrorKind::Io, "failed to write output file", {{"path", path.string()}});
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create output directory", {{"path", dir}, {"reason", ec.message()}});
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Maximum state entropy toolkit for tabular controlled Markov processes", "maxent"};
  app.require_subcommand(1);

  Common c;
  OptimizerFlags o;
  std::vector<std::string> prefixes;
  int max_prefix_states = 3;
  std::string regret_policy = "markov";
  std::string policy_spec = "uniform";
  bool exact = false;
  std::optional<int> rollouts;
  int compare_runs = 100;
  int mcts_runs = 1;
  SearchConfig search;
  std::optional<int> max_depth;
  bool show_stats = false;

  auto* validate = app.add_subcommand("validate", "Check a CMP and report every violation");
  add_env(validate, c);

  auto* solve = app.add_subcommand("solve-nm", "Optimal non-Markovian policy by backward induction");
  add_env(solve, c);
  add_episode(solve, c);
  solve->add_option("--prefix", prefixes, "Solve from this prefix \"s0,a0,s1,...\"")->expected(0, 1);
  solve->add_option("--out", c.out, "Write value_table.csv and policy.json here");

  auto* optimize = app.add_subcommand("optimize-markov", "Best Markov policy by grid search or CEM");
  add_env(optimize, c);
  add_episode(optimize, c);
  add_optimizer(optimize, o);
  optimize->add_option("--out", c.out, "Write policy.json and trace.csv here");

  auto* evaluate = app.add_subcommand("evaluate", "Expected entropy of a policy, exactly or by rollouts");
  add_env(evaluate, c);
  add_episode(evaluate, c);
  evaluate->add_option("--policy", policy_spec, "Policy JSON path, 'uniform', or 'nm' for the optimal count policy")->capture_default_str();
  auto* exact_flag = evaluate->add_flag("--exact", exact, "Exact evaluation (default)");
  auto* rollouts_opt = evaluate->add_option("--rollouts", rollouts, "Monte-Carlo estimate from this many episodes")->check(CLI::Range(2, 1'000'000'000));
  exact_flag->excludes(rollouts_opt);

  auto* compare = app.add_subcommand("compare", "Non-Markovian optimum versus the Markov baseline");
  add_env(compare, c);
  add_episode(compare, c);
  add_optimizer(compare, o);
  compare->add_option("--runs", compare_runs, "Seeded episodes per policy")->check(CLI::PositiveNumber)->capture_default_str();
  compare->add_option("--out", c.out, "Artifact directory")->required();

  auto* regret = app.add_subcommand("regret", "Regret-to-go and its bounds per prefix");
  add_env(regret, c);
  add_episode(regret, c);
  add_optimizer(regret, o);
  regret->add_option("--prefix", prefixes, "Prefix \"s0,a0,s1,...\" (repeatable); default: all feasible prefixes");
  regret->add_option("--max-prefix-states", max_prefix_states, "Longest prefix when enumerating")->check(CLI::PositiveNumber)->capture_default_str();
  regret->add_option("--regret-policy", regret_policy, "Policy whose regret fills the regret column")
      ->check(CLI::IsMember({"markov", "nm"}))
      ->capture_default_str();
  regret->add_option("--out", c.out, "Write regret.csv here");

  auto* mcts = app.add_subcommand("mcts", "Play episodes with the UCT planner");
  add_env(mcts, c);
  add_episode(mcts, c);
  mcts->add_option("--budget", search.budget, "UCT iterations per decision")->capture_default_str();
  mcts->add_option("--uct-c", search.uct_c, "Exploration constant")->capture_default_str();
  mcts->add_option("--max-depth", max_depth, "Depth cut in steps");
  mcts->add_option("--runs", mcts_runs, "Episodes (seeds seed, seed+1, ...)")->check(CLI::PositiveNumber)->capture_default_str();
  mcts->add_flag("--stats", show_stats, "Print root statistics of the first decision");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << nlohmann::json{{"error", "Usage"}, {"message", e.what()}}.dump() << "\n";
    const CLI::App* sub = nullptr;
    for (const auto* s : app.get_subcommands()) sub = s;
    err << (sub ? sub->help() : app.help());
    return kUsageExit;
  }

  try {
    auto cfg = make_config(c, o);
    const EpisodeSpec spec{c.horizon, std::nullopt};
    const ExactOptions exact_options{c.node_cap};

    if (*validate) {
      const Cmp cmp = load_env(c.env, env_params(c));
      out << nlohmann::json{{"ok", true}, {"states", cmp.num_states()}, {"actions", cmp.num_actions()}}.dump() << "\n";
      return 0;
    }
    if (*solve) {
      const Cmp cmp = load_env(c.env, env_params(c));
      std::optional<History> prefix;
      if (!prefixes.empty()) prefix = parse_history(prefixes.front());
      const auto sol = solve_non_markovian(cmp, spec, prefix, c.node_cap);
      nlohmann::json j = {{"optimal_value", sol.values.optimal_value()}, {"nodes", sol.values.entries().size()}, {"horizon", c.horizon}};
      if (prefix) j["prefix"] = format_history(*prefix);
      if (!c.out.empty()) {
        ensure_dir(c.out);
        std::ostringstream csv;
        sol.values.write_csv(csv);
        write_file(std::filesystem::path(c.out) / "value_table.csv", csv.str());
        write_file(std::filesystem::path(c.out) / "policy.json", serialize_policy(Policy(sol.policy)).dump(2) + "\n");
      }
      out << j.dump() << "\n";
      return 0;
    }
    if (*optimize) {
      const Cmp cmp = load_env(c.env, env_params(c));
      const auto res = optimize_markov(cmp, spec, cfg.markov_class, cfg.method, cfg.optimize, cfg.seed);
      if (!c.out.empty()) {
        ensure_dir(c.out);
        std::ostringstream trace;
        trace << "restart,iteration,best_value,population_mean\n";
        char buf[128];
        for (const auto& t : res.trace) {
          std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g\n", t.restart, t.iteration, t.best_value, t.population_mean);
          trace << buf;
        }
        write_file(std::filesystem::path(c.out) / "trace.csv", trace.str());
        write_file(std::filesystem::path(c.out) / "policy.json", serialize_policy(res.policy).dump(2) + "\n");
      }
      out << nlohmann::json{{"value", res.value}, {"evaluations", res.evaluations}, {"class", o.cls}, {"method", o.method}}.dump()
          << "\n";
      return 0;
    }
    if (*evaluate) {
      const Cmp cmp = load_env(c.env, env_params(c));
      std::optional<Policy> policy;
      if (policy_spec == "uniform") {
        policy.emplace(MarkovStationaryPolicy::uniform(cmp.num_states(), cmp.num_actions()));
      } else if (policy_spec == "nm") {
        policy.emplace(solve_non_markovian(cmp, spec, std::nullopt, c.node_cap).policy);
      } else {
        policy.emplace(load_policy(policy_spec, c.horizon));
      }
      check_policy_fits(*policy, cmp, spec);
      if (rollouts) {
        const auto est = monte_carlo_expected_entropy(cmp, *policy, spec, static_cast<std::size_t>(*rollouts), cfg.seed,
                                                      cfg.optimize.execution);
        out << nlohmann::json{{"mc_mean", est.mean}, {"ci_halfwidth", est.ci_halfwidth}, {"std_error", est.std_error},
                              {"rollouts", est.num_rollouts}}.dump()
            << "\n";
      } else {
        out << nlohmann::json{{"exact_expected_entropy", exact_expected_entropy(cmp, *policy, spec, exact_options)}}.dump() << "\n";
      }
      return 0;
    }
    if (*compare) {
      cfg.runs = compare_runs;
      const auto res = run_compare(cfg);
      out << res.summary.dump() << "\n";
      return 0;
    }
    if (*regret) {
      std::vector<History> list;
      if (prefixes.empty()) {
        list = feasible_prefixes(load_env(c.env, env_params(c)), std::min(max_prefix_states, c.horizon));
      } else {
        for (const auto& p : prefixes) list.push_back(parse_history(p));
      }
      const auto reports =
          run_regret_sweep(cfg, list, regret_policy == "nm" ? RegretPolicy::NonMarkov : RegretPolicy::Markov);
      write_regret_csv(out, reports);
      return 0;
    }
    if (*mcts) {
      const Cmp cmp = load_env(c.env, env_params(c));
      search.max_depth = max_depth;
      const auto episodes = run_mcts_episodes(cmp, spec, search, mcts_runs, cfg.seed, cfg.optimize.execution);
      for (std::size_t i = 0; i < episodes.size(); ++i)
        out << nlohmann::json{{"seed", cfg.seed + i}, {"history", format_history(episodes[i].history)},
                              {"entropy", episodes[i].entropy}}.dump()
            << "\n";
      if (show_stats) {
        VisitCounts counts{std::vector<int>(static_cast<std::size_t>(cmp.num_states()), 0), c.horizon};
        const int s0 = episodes.front().history.states.front();
        counts.add(s0);
        SearchConfig first = search;
        first.seed = mcts_step_seed(cfg.seed, 0);
        out << plan_action(cmp, spec, counts, s0, first).root.to_json().dump() << "\n";
      }
      return 0;
    }
  } catch (const Error& e) {
    err << e.to_json().dump() << "\n";
    return exit_code(e.kind());
  } catch (const CLI::ValidationError& e) {
    err << nlohmann::json{{"error", "Usage"}, {"message", e.what()}}.dump() << "\n";
    return kUsageExit;
  } catch (const std::exception& e) {
    err << nlohmann::json{{"error", "Internal"}, {"message", e.what()}}.dump() << "\n";
    return 1;
  }
  return kUsageExit;
}

}  // namespace maxent
