#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "maxent/cli.hpp"
#include "maxent/cmp_io.hpp"
#include "maxent/error.hpp"
#include "maxent/experiments.hpp"
#include "maxent/nm_solver.hpp"
#include "maxent/presets.hpp"

using namespace maxent;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("maxent_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream l(line);
    std::string cell;
    while (std::getline(l, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "maxent");
  std::ostringstream out, err;
  const int code = cli_main(args, out, err);
  return {code, out.str(), err.str()};
}

ExperimentConfig small_config(const fs::path& out) {
  ExperimentConfig c;
  c.env = "three_state";
  c.horizon = 9;
  c.runs = 100;
  c.seed = 7;
  c.optimize.iterations = 80;
  c.optimize.restarts = 2;
  c.out = out;
  return c;
}

}  // namespace

TEST_SUITE("experiments") {
  TEST_CASE("three_state preset") {
    const Cmp cmp = build_preset("three_state");
    CHECK(validate_cmp(cmp).ok());
    CHECK(cmp.p(0, 1, 2) == 1.0);
    CHECK(cmp.p(0, 0, 1) == 1.0);
    CHECK(cmp.p(1, 0, 1) == 1.0);
    CHECK(cmp.p(2, 1, 2) == 1.0);
    CHECK(cmp.initial()[0] == 1.0);

    const Cmp slippery = build_preset("three_state", {{"slip", 0.2}});
    CHECK(validate_cmp(slippery).ok());
    CHECK(slippery.p(0, 1, 2) == doctest::Approx(0.8));
    CHECK(slippery.p(0, 1, 0) == doctest::Approx(0.2));
    CHECK(slippery.p(1, 0, 1) == 1.0);
    CHECK_THROWS_AS(build_preset("three_state", {{"slip", 1.5}}), Error);
    CHECK_THROWS_AS(build_preset("three_state", {{"advance", 0.5}}), Error);
    // Any slip breaks the single realized path, so H* drops below log 3.
    CHECK(solve_non_markovian(slippery, {9, {}}).values.optimal_value() < std::log(3.0) - 1e-3);
  }

  TEST_CASE("river_swim preset") {
    const Cmp cmp = build_preset("river_swim");
    CHECK(validate_cmp(cmp).ok());
    const auto row = cmp.row(1, 1);
    CHECK(row[0] == doctest::Approx(0.05));
    CHECK(row[1] == doctest::Approx(0.35));
    CHECK(row[2] == doctest::Approx(0.60));
    CHECK(cmp.p(2, 0, 1) == 1.0);

    const Cmp det = build_preset("river_swim", {{"advance", 1.0}, {"stay", 0.0}, {"back", 0.0}});
    for (int s = 0; s < 3; ++s)
      for (int a = 0; a < 2; ++a) {
        int ones = 0;
        for (double p : det.row(s, a)) ones += p == 1.0;
        CHECK(ones == 1);
      }
    CHECK_THROWS_AS(build_preset("river_swim", {{"advance", 0.9}}), Error);
    CHECK_THROWS_AS(build_preset("river_swim", {{"slip", 0.1}}), Error);
    try {
      build_preset("four_rooms");
      FAIL("expected UnknownPreset");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::UnknownPreset);
    }
  }

  TEST_CASE("CMP JSON round trip and strict parsing") {
    const Cmp cmp = three_state();
    const auto doc = cmp_to_json(cmp);
    const Cmp back = cmp_from_json(doc);
    CHECK(back.state_labels() == cmp.state_labels());
    CHECK(std::equal(back.transitions().begin(), back.transitions().end(), cmp.transitions().begin()));

    auto bad = doc;
    bad["reward"] = 1;
    CHECK_THROWS_AS(cmp_from_json(bad), Error);
    bad = doc;
    bad["transitions"][1][0] = {1.0, 0.0};
    CHECK_THROWS_AS(cmp_from_json(bad), Error);
    bad = doc;
    bad["transitions"][1][0] = {0.9, 0.0, 0.0};
    try {
      cmp_from_json(bad);
      FAIL("expected NonStochasticRow");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::NonStochasticRow);
    }
    CHECK_NOTHROW(cmp_from_json({{"states", 1}, {"actions", 1}, {"transitions", {{{1.0}}}}, {"initial", {1.0}}}));
  }

  TEST_CASE("compare writes stable artifacts") {
    const auto dir = scratch("compare");
    const auto res = run_compare(small_config(dir));
    for (const char* f : {"summary.json", "entropy_hist.csv", "visit_freq.csv", "policy_non_markov.json", "policy_markov.json"})
      CHECK(fs::exists(dir / f));
    CHECK(res.non_markov.exact > res.markov.exact);

    const auto hist = csv_rows(slurp(dir / "entropy_hist.csv"));
    double nm_total = 0.0, m_total = 0.0;
    int nm_rows = 0;
    for (const auto& r : hist) {
      REQUIRE(r.size() == 3);
      CHECK(r[1].size() == r[1].find('.') + 7);
      (r[0] == "non_markov" ? nm_total : m_total) += std::stod(r[2]);
      nm_rows += r[0] == "non_markov";
    }
    CHECK(nm_rows == 1);
    CHECK(std::abs(nm_total - 1.0) <= 1e-9);
    CHECK(std::abs(m_total - 1.0) <= 1e-9);

    const auto visits = csv_rows(slurp(dir / "visit_freq.csv"));
    REQUIRE(visits.size() == 6);
    double sums[2] = {0, 0};
    for (const auto& r : visits) {
      sums[r[0] == "markov"] += std::stod(r[2]);
      CHECK(std::stod(r[3]) >= 0.0);
    }
    CHECK(std::abs(sums[0] - 1.0) <= 1e-9);
    CHECK(std::abs(sums[1] - 1.0) <= 1e-9);

    const auto first = slurp(dir / "entropy_hist.csv") + slurp(dir / "visit_freq.csv") + slurp(dir / "summary.json");
    run_compare(small_config(dir));
    CHECK(first == slurp(dir / "entropy_hist.csv") + slurp(dir / "visit_freq.csv") + slurp(dir / "summary.json"));
    fs::remove_all(dir);
  }

  TEST_CASE("single-action environment: identical numbers, zero CI") {
    const auto dir = scratch("single");
    const auto env = fs::temp_directory_path() / "maxent_test_single.json";
    std::ofstream(env) << R"({"states": 2, "actions": 1, "transitions": [[[0, 1]], [[1, 0]]], "initial": [1, 0]})";
    auto cfg = small_config(dir);
    cfg.env = env.string();
    cfg.horizon = 5;
    const auto res = run_compare(cfg);
    CHECK(res.non_markov.exact == res.markov.exact);
    CHECK(res.non_markov.entropy.mean == res.markov.entropy.mean);
    CHECK(res.non_markov.entropy.ci_halfwidth == 0.0);
    CHECK(res.markov.entropy.ci_halfwidth == 0.0);
    fs::remove_all(dir);
    fs::remove(env);
  }

  TEST_CASE("failed compare leaves nothing behind") {
    const auto dir = scratch("failed");
    auto cfg = small_config(dir);
    cfg.method = OptimizeMethod::Grid;
    cfg.markov_class = MarkovClass::TimeVarying;
    CHECK_THROWS_AS(run_compare(cfg), Error);
    CHECK_FALSE(fs::exists(dir));
  }

  TEST_CASE("feasible prefixes") {
    const auto p = feasible_prefixes(three_state(), 3);
    CHECK(p.size() == 1 + 2 + 4);
    CHECK(format_history(p[1]) == "0,0,1");
  }

  TEST_CASE("regret sweep") {
    auto cfg = small_config({});
    const auto prefixes = feasible_prefixes(three_state(), 2);
    const auto nm_rows = run_regret_sweep(cfg, prefixes, RegretPolicy::NonMarkov);
    for (const auto& r : nm_rows) CHECK(std::abs(r.regret) <= 1e-12);
    std::ostringstream csv;
    write_regret_csv(csv, nm_rows);
    CHECK(csv.str().rfind("t,H_star,H_second,H_worst,regret,lower,upper,variance_term,prob_opt\n", 0) == 0);

    const auto env = fs::temp_directory_path() / "maxent_test_single_regret.json";
    std::ofstream(env) << R"({"states": 2, "actions": 1, "transitions": [[[0, 1]], [[1, 0]]], "initial": [1, 0]})";
    cfg.env = env.string();
    cfg.horizon = 4;
    for (const auto& r : run_regret_sweep(cfg, feasible_prefixes(load_env(cfg.env), 3))) {
      CHECK(r.regret == 0.0);
      CHECK(*r.lower_bound == 0.0);
      CHECK(*r.upper_bound == 0.0);
    }
    fs::remove(env);
  }

  TEST_CASE("mcts episodes match across execution modes") {
    SearchConfig search;
    search.budget = 300;
    const EpisodeSpec spec{6, {}};
    const auto a = run_mcts_episodes(river_swim(), spec, search, 6, 4, Execution::Serial);
    const auto b = run_mcts_episodes(river_swim(), spec, search, 6, 4, Execution::Parallel);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].history.states == b[i].history.states);
      CHECK(a[i].entropy == b[i].entropy);
    }
  }

  TEST_CASE("cli: compare") {
    const auto dir = scratch("cli_compare");
    const auto r = cli({"compare", "--env", "three_state", "--horizon", "9", "--runs", "100", "--seed", "7", "--iterations", "60",
                        "--restarts", "2", "--out", dir.string()});
    CHECK(r.code == 0);
    CHECK(fs::exists(dir / "summary.json"));
    CHECK(fs::exists(dir / "entropy_hist.csv"));
    CHECK(fs::exists(dir / "visit_freq.csv"));
    fs::remove_all(dir);
  }

  TEST_CASE("cli: validation errors are single-line JSON with exit 1") {
    const auto env = fs::temp_directory_path() / "maxent_test_bad.json";
    std::ofstream(env) << R"({"states": 2, "actions": 1, "transitions": [[[0.5, 0.4]], [[1, 0]]], "initial": [1, 0]})";
    const auto r = cli({"solve-nm", "--env", env.string()});
    CHECK(r.code == 1);
    REQUIRE(!r.err.empty());
    CHECK(r.err.find('\n') == r.err.size() - 1);
    const auto j = nlohmann::json::parse(r.err);
    CHECK(j["error"] == "NonStochasticRow");
    fs::remove(env);
  }

  TEST_CASE("cli: cap errors exit 2, usage errors exit 64") {
    CHECK(cli({"solve-nm", "--env", "three_state", "--horizon", "9", "--node-cap", "5"}).code == 2);
    CHECK(cli({"frobnicate"}).code == kUsageExit);
    CHECK(cli({}).code == kUsageExit);
    CHECK(cli({"compare", "--env", "three_state"}).code == kUsageExit);
    CHECK(cli({"evaluate", "--exact", "--rollouts", "10"}).code == kUsageExit);
    CHECK(cli({"--help"}).code == 0);
  }

  TEST_CASE("cli: subcommands") {
    auto r = cli({"validate", "--env", "river_swim"});
    CHECK(r.code == 0);
    r = cli({"solve-nm", "--env", "three_state", "--horizon", "9"});
    CHECK(r.code == 0);
    CHECK(nlohmann::json::parse(r.out)["optimal_value"].get<double>() == doctest::Approx(std::log(3.0)));
    r = cli({"optimize-markov", "--env", "three_state", "--horizon", "9", "--method", "grid", "--grid-res", "11"});
    CHECK(r.code == 0);
    r = cli({"evaluate", "--env", "three_state", "--horizon", "9", "--policy", "nm", "--exact"});
    CHECK(nlohmann::json::parse(r.out)["exact_expected_entropy"].get<double>() == doctest::Approx(std::log(3.0)));
    r = cli({"evaluate", "--env", "river_swim", "--horizon", "6", "--rollouts", "1000", "--seed", "2"});
    CHECK(r.code == 0);
    r = cli({"regret", "--env", "three_state", "--horizon", "5", "--prefix", "0,1,2", "--iterations", "40", "--restarts", "1"});
    CHECK(r.code == 0);
    CHECK(csv_rows(r.out).size() == 1);
    r = cli({"mcts", "--env", "three_state", "--horizon", "9", "--budget", "10000", "--seed", "3"});
    CHECK(r.code == 0);
    CHECK(nlohmann::json::parse(r.out)["entropy"].get<double>() == doctest::Approx(std::log(3.0)).epsilon(1e-12));
    r = cli({"mcts", "--env", "river_swim", "--advance", "1", "--stay", "0", "--back", "0", "--horizon", "5", "--budget", "100"});
    CHECK(r.code == 0);
  }

  TEST_CASE("cli: seed fallback from the environment") {
    ::setenv("MAXENT_SEED", "11", 1);
    const auto a = cli({"evaluate", "--env", "river_swim", "--horizon", "6", "--rollouts", "500"});
    const auto b = cli({"evaluate", "--env", "river_swim", "--horizon", "6", "--rollouts", "500", "--seed", "11"});
    ::setenv("MAXENT_SEED", "nope", 1);
    const auto c = cli({"evaluate", "--env", "river_swim", "--horizon", "6", "--rollouts", "500"});
    ::unsetenv("MAXENT_SEED");
    CHECK(a.out == b.out);
    CHECK(c.code == kUsageExit);
  }
}
