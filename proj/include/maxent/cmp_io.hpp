#pragma once

#include <filesystem>

#include <json.hpp>

#include "maxent/cmp.hpp"

namespace maxent {

/// {"states": S or [names], "actions": A, "transitions": [[[p]]] indexed
/// s, a, s', "initial": [p]}. Unknown keys and ragged tensors are rejected
/// with SchemaError; the parsed model must pass validate_cmp.
Cmp cmp_from_json(const nlohmann::json& doc);
nlohmann::json cmp_to_json(const Cmp& cmp);

Cmp load_cmp(const std::filesystem::path& path);

}  // namespace maxent
