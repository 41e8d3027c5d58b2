#include "maxent/policy_io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "maxent/error.hpp"

namespace maxent {
namespace {

using nlohmann::json;

[[noreturn]] void schema(const std::string& path, const std::string& reason) {
  throw Error(ErrorKind::SchemaError, path + ": " + reason, {{"path", path}, {"reason", reason}});
}

std::string count_key(const std::vector<int>& counts, int state) {
  std::string out;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(counts[i]);
  }
  return out + ":" + std::to_string(state);
}

int get_int(const json& doc, const char* key, int min_value) {
  const std::string path = std::string("/") + key;
  if (!doc.contains(key)) schema(path, "missing");
  const auto& v = doc[key];
  if (!v.is_number_integer() || v.get<long long>() < min_value) schema(path, "expected an integer >= " + std::to_string(min_value));
  return v.get<int>();
}

std::vector<double> row_of(const json& v, int n, const std::string& path, bool stochastic) {
  if (!v.is_array() || v.size() != static_cast<std::size_t>(n)) schema(path, "expected " + std::to_string(n) + " numbers");
  std::vector<double> out;
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) schema(path + "/" + std::to_string(i), "expected a number");
    out.push_back(v[i].get<double>());
    sum += out.back();
    if (stochastic && !(out.back() >= 0.0)) schema(path + "/" + std::to_string(i), "negative probability");
  }
  if (stochastic && std::abs(sum - 1.0) > kStochasticTolerance) {
    std::ostringstream why;
    why.precision(17);
    why << "row sums to " << sum;
    schema(path, why.str());
  }
  return out;
}

void append_table(const json& v, int S, int A, const std::string& path, std::vector<double>& out) {
  if (!v.is_array() || v.size() != static_cast<std::size_t>(S)) schema(path, "expected one row per state");
  for (int s = 0; s < S; ++s) {
    const auto row = row_of(v[static_cast<std::size_t>(s)], A, path + "/" + std::to_string(s), true);
    out.insert(out.end(), row.begin(), row.end());
  }
}

json table_json(std::span<const double> flat, int rows, int cols) {
  json out = json::array();
  for (int r = 0; r < rows; ++r) {
    const auto* p = flat.data() + static_cast<std::size_t>(r) * cols;
    out.push_back(std::vector<double>(p, p + cols));
  }
  return out;
}

std::pair<std::vector<int>, int> parse_count_key(const std::string& key, int S, const std::string& path) {
  const auto colon = key.find(':');
  if (colon == std::string::npos) schema(path, "count key must look like \"c0,c1,...:state\"");
  std::vector<int> counts;
  std::stringstream ss(key.substr(0, colon));
  std::string tok;
  try {
    while (std::getline(ss, tok, ',')) counts.push_back(std::stoi(tok));
    const int state = std::stoi(key.substr(colon + 1));
    if (static_cast<int>(counts.size()) != S) schema(path, "count key needs one count per state");
    return {counts, state};
  } catch (const std::logic_error&) {
    schema(path, "count key must look like \"c0,c1,...:state\"");
  }
}

}  // namespace

json serialize_policy(const Policy& policy) {
  json doc = {{"kind", std::string(to_string(policy.kind()))},
              {"horizon", policy.horizon()},
              {"num_states", policy.num_states()},
              {"num_actions", policy.num_actions()}};
  const int S = policy.num_states();
  const int A = policy.num_actions();
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, MarkovStationaryPolicy>) {
          doc["table"] = table_json(p.table(), S, A);
        } else if constexpr (std::is_same_v<T, MarkovTimeVaryingPolicy>) {
          json tables = json::array();
          for (int t = 0; t + 1 < p.horizon(); ++t)
            tables.push_back(table_json(std::span(p.tables()).subspan(static_cast<std::size_t>(t) * S * A, static_cast<std::size_t>(S) * A), S, A));
          doc["tables"] = tables;
        } else if constexpr (std::is_same_v<T, NonMarkovCountPolicy>) {
          json decisions = json::object();
          for (const auto& [key, dist] : p.entries()) {
            const auto name = count_key(p.codec().counts(key), p.codec().state(key));
            if (p.deterministic()) decisions[name] = p.action(key);
            else decisions[name] = *dist;
          }
          doc["decisions"] = decisions;
        } else if constexpr (std::is_same_v<T, FiniteWindowPolicy>) {
          doc["window"] = p.window();
          json rows = json::array();
          for (const auto& [suffix, dist] : p.table()) rows.push_back({{"suffix", suffix}, {"dist", dist}});
          doc["table"] = rows;
        } else {
          doc["lambda"] = p.lambda();
          doc["weights"] = table_json(p.weights(), A, 2 * S);
        }
      },
      policy.variant());
  return doc;
}

Policy deserialize_policy(const json& doc, std::optional<int> expected_horizon) {
  if (!doc.is_object()) schema("", "expected an object");
  if (!doc.contains("kind") || !doc["kind"].is_string()) schema("/kind", "missing or not a string");
  const auto kind = doc["kind"].get<std::string>();
  const int horizon = get_int(doc, "horizon", 0);
  const int S = get_int(doc, "num_states", 1);
  const int A = get_int(doc, "num_actions", 1);

  std::set<std::string> allowed = {"kind", "horizon", "num_states", "num_actions"};
  auto check_keys = [&](std::initializer_list<const char*> extra) {
    for (const char* k : extra) {
      allowed.insert(k);
      if (!doc.contains(k)) schema(std::string("/") + k, "missing");
    }
    for (const auto& [key, value] : doc.items()) {
      (void)value;
      if (!allowed.count(key)) schema("/" + key, "unknown key");
    }
  };
  const bool horizon_bound = kind == "markov_time_varying" || kind == "non_markov_count";
  if (horizon_bound && horizon < 1) schema("/horizon", "this policy kind needs a horizon >= 1");
  if (expected_horizon && horizon != 0 && horizon != *expected_horizon)
    schema("/horizon", "policy horizon " + std::to_string(horizon) + " does not match " + std::to_string(*expected_horizon));

  try {
    if (kind == "markov_stationary") {
      check_keys({"table"});
      std::vector<double> flat;
      append_table(doc["table"], S, A, "/table", flat);
      return Policy(MarkovStationaryPolicy(S, A, std::move(flat)), horizon);
    }
    if (kind == "markov_time_varying") {
      check_keys({"tables"});
      const auto& tables = doc["tables"];
      if (!tables.is_array() || tables.size() != static_cast<std::size_t>(horizon - 1))
        schema("/tables", "expected horizon - 1 decision rules");
      std::vector<double> flat;
      for (std::size_t t = 0; t < tables.size(); ++t) append_table(tables[t], S, A, "/tables/" + std::to_string(t), flat);
      return Policy(MarkovTimeVaryingPolicy(S, A, horizon, std::move(flat)));
    }
    if (kind == "non_markov_count") {
      check_keys({"decisions"});
      const auto& decisions = doc["decisions"];
      if (!decisions.is_object()) schema("/decisions", "expected an object");
      NonMarkovCountPolicy p(S, A, horizon);
      for (const auto& [key, value] : decisions.items()) {
        const auto path = "/decisions/" + key;
        const auto [counts, state] = parse_count_key(key, S, path);
        int total = 0;
        for (int c : counts) {
          if (c < 0) schema(path, "negative count");
          total += c;
        }
        if (state < 0 || state >= S || counts[static_cast<std::size_t>(state)] < 1 || total >= horizon)
          schema(path, "not a decision node for this horizon");
        if (value.is_number_integer()) {
          const int a = value.get<int>();
          if (a < 0 || a >= A) schema(path, "action out of range");
          p.set_action(counts, state, a);
        } else {
          p.set_distribution(counts, state, row_of(value, A, path, true));
        }
      }
      return Policy(std::move(p));
    }
    if (kind == "finite_window") {
      check_keys({"window", "table"});
      const int window = get_int(doc, "window", 1);
      FiniteWindowPolicy p(S, A, window);
      const auto& table = doc["table"];
      if (!table.is_array()) schema("/table", "expected an array");
      for (std::size_t i = 0; i < table.size(); ++i) {
        const auto path = "/table/" + std::to_string(i);
        const auto& entry = table[i];
        if (!entry.is_object() || !entry.contains("suffix") || !entry.contains("dist") || entry.size() != 2)
          schema(path, "expected {\"suffix\", \"dist\"}");
        if (!entry["suffix"].is_array()) schema(path + "/suffix", "expected an array");
        std::vector<int> suffix;
        for (const auto& x : entry["suffix"]) {
          if (!x.is_number_integer()) schema(path + "/suffix", "expected integers");
          suffix.push_back(x.get<int>());
        }
        for (std::size_t j = 0; j < suffix.size(); ++j) {
          const int bound = j % 2 == 0 ? S : A;
          if (suffix[j] < 0 || suffix[j] >= bound) schema(path + "/suffix/" + std::to_string(j), "index out of range");
        }
        p.set(std::move(suffix), row_of(entry["dist"], A, path + "/dist", true));
      }
      return Policy(std::move(p), horizon);
    }
    if (kind == "eligibility_trace") {
      check_keys({"lambda", "weights"});
      if (!doc["lambda"].is_number()) schema("/lambda", "expected a number");
      const auto& w = doc["weights"];
      if (!w.is_array() || w.size() != static_cast<std::size_t>(A)) schema("/weights", "expected one row per action");
      std::vector<double> flat;
      for (int a = 0; a < A; ++a) {
        const auto row = row_of(w[static_cast<std::size_t>(a)], 2 * S, "/weights/" + std::to_string(a), false);
        flat.insert(flat.end(), row.begin(), row.end());
      }
      return Policy(EligibilityTracePolicy(S, A, doc["lambda"].get<double>(), std::move(flat)), horizon);
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::SchemaError) throw;
    schema("", e.what());
  }
  schema("/kind", "unknown policy kind \"" + kind + "\"");
}

Policy load_policy(const std::filesystem::path& path, std::optional<int> expected_horizon) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open policy file", {{"path", path.string()}});
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::SchemaError, "policy file is not valid JSON", {{"path", path.string()}, {"reason", e.what()}});
  }
  return deserialize_policy(doc, expected_horizon);
}

}  // namespace maxent
