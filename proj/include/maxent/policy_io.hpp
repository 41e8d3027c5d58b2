#pragma once

#include <filesystem>
#include <optional>

#include <json.hpp>

#include "maxent/policy.hpp"

namespace maxent {

/// {"kind": ..., "horizon": T, "num_states": S, "num_actions": A, ...}.
/// Kind-specific fields:
///   markov_stationary    "table": [s][a]
///   markov_time_varying  "tables": [t][s][a]
///   non_markov_count     "decisions": {"c0,c1,...:state": action | [dist]}
///   finite_window        "window": H, "table": [{"suffix": [...], "dist": [...]}]
///   eligibility_trace    "lambda": l, "weights": [a][2S]
nlohmann::json serialize_policy(const Policy& policy);

/// Inverse of serialize_policy. Every problem is a SchemaError carrying the
/// JSON path and a reason. When `expected_horizon` is given, a policy tied to
/// another horizon is rejected.
Policy deserialize_policy(const nlohmann::json& doc, std::optional<int> expected_horizon = std::nullopt);

Policy load_policy(const std::filesystem::path& path, std::optional<int> expected_horizon = std::nullopt);

}  // namespace maxent
