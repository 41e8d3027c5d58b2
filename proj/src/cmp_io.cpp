#include "maxent/cmp_io.hpp"

#include <fstream>

#include "maxent/error.hpp"

namespace maxent {
namespace {

[[noreturn]] void schema(const std::string& path, const std::string& reason) {
  throw Error(ErrorKind::SchemaError, path + ": " + reason, {{"path", path}, {"reason", reason}});
}

int positive_int(const nlohmann::json& v, const std::string& path) {
  if (!v.is_number_integer() || v.get<long long>() < 1) schema(path, "expected a positive integer");
  return v.get<int>();
}

std::vector<double> number_array(const nlohmann::json& v, std::size_t n, const std::string& path) {
  if (!v.is_array()) schema(path, "expected an array");
  if (v.size() != n) schema(path, "expected " + std::to_string(n) + " entries, found " + std::to_string(v.size()));
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!v[i].is_number()) schema(path + "/" + std::to_string(i), "expected a number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

}  // namespace

Cmp cmp_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) schema("", "expected an object");
  for (const auto& [key, value] : doc.items()) {
    (void)value;
    if (key != "states" && key != "actions" && key != "transitions" && key != "initial") schema("/" + key, "unknown key");
  }
  for (const char* key : {"states", "actions", "transitions", "initial"})
    if (!doc.contains(key)) schema(std::string("/") + key, "missing");

  int S = 0;
  std::vector<std::string> labels;
  const auto& states = doc["states"];
  if (states.is_array()) {
    if (states.empty()) schema("/states", "expected at least one state");
    for (std::size_t i = 0; i < states.size(); ++i) {
      if (!states[i].is_string()) schema("/states/" + std::to_string(i), "expected a string");
      labels.push_back(states[i].get<std::string>());
    }
    S = static_cast<int>(labels.size());
  } else {
    S = positive_int(states, "/states");
  }
  const int A = positive_int(doc["actions"], "/actions");

  const auto& tr = doc["transitions"];
  if (!tr.is_array() || tr.size() != static_cast<std::size_t>(S)) schema("/transitions", "expected S action blocks");
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(S) * A * S);
  for (int s = 0; s < S; ++s) {
    const auto path = "/transitions/" + std::to_string(s);
    const auto& block = tr[static_cast<std::size_t>(s)];
    if (!block.is_array() || block.size() != static_cast<std::size_t>(A)) schema(path, "expected A rows");
    for (int a = 0; a < A; ++a) {
      const auto row = number_array(block[static_cast<std::size_t>(a)], static_cast<std::size_t>(S), path + "/" + std::to_string(a));
      flat.insert(flat.end(), row.begin(), row.end());
    }
  }
  auto initial = number_array(doc["initial"], static_cast<std::size_t>(S), "/initial");
  Cmp cmp(S, A, std::move(flat), std::move(initial), std::move(labels));
  require_valid(cmp);
  return cmp;
}

nlohmann::json cmp_to_json(const Cmp& cmp) {
  const int S = cmp.num_states();
  const int A = cmp.num_actions();
  nlohmann::json tr = nlohmann::json::array();
  for (int s = 0; s < S; ++s) {
    nlohmann::json block = nlohmann::json::array();
    for (int a = 0; a < A; ++a) {
      const auto row = cmp.row(s, a);
      block.push_back(std::vector<double>(row.begin(), row.end()));
    }
    tr.push_back(std::move(block));
  }
  nlohmann::json states = cmp.state_labels().empty() ? nlohmann::json(S) : nlohmann::json(cmp.state_labels());
  return {{"states", states},
          {"actions", A},
          {"transitions", tr},
          {"initial", std::vector<double>(cmp.initial().begin(), cmp.initial().end())}};
}

Cmp load_cmp(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open CMP file", {{"path", path.string()}});
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::SchemaError, "CMP file is not valid JSON", {{"path", path.string()}, {"reason", e.what()}});
  }
  return cmp_from_json(doc);
}

}  // namespace maxent
