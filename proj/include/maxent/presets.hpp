#pragma once

#include <string_view>

#include <json.hpp>

#include "maxent/cmp.hpp"

namespace maxent {

/// Line of three cells 1 - 0 - 2 with the start in the middle cell 0.
/// Action 0 moves left, action 1 moves right; walls self-loop. With
/// probability `slip` a move fails and the agent stays where it is.
Cmp three_state(double slip = 0.0);

struct RiverSwimParams {
  double advance = 0.6;
  double stay = 0.35;
  double back = 0.05;
};

/// Three-state chain started at 0. Action 0 (left) moves deterministically
/// toward 0; action 1 (right) advances, stays or slips back with the given
/// probabilities, with the mass of impossible moves kept in place at the ends.
Cmp river_swim(const RiverSwimParams& params = {});

/// "three_state" with optional {"slip"} or "river_swim" with optional
/// {"advance", "stay", "back"}. Throws UnknownPreset or BadParams.
Cmp build_preset(std::string_view name, const nlohmann::json& params = nlohmann::json::object());

bool is_preset(std::string_view name);

}  // namespace maxent
