#include "maxent/presets.hpp"

#include <algorithm>
#include <cmath>

#include "maxent/error.hpp"

namespace maxent {

Cmp three_state(double slip) {
  if (!(slip >= 0.0 && slip <= 1.0))
    throw Error(ErrorKind::BadParams, "three_state slip must lie in [0, 1]", {{"slip", slip}});
  constexpr int S = 3, A = 2;
  std::vector<double> p(S * A * S, 0.0);
  auto set = [&](int s, int a, int next) {
    p[(s * A + a) * S + next] += 1.0 - slip;
    p[(s * A + a) * S + s] += slip;
  };
  set(0, 0, 1);
  set(0, 1, 2);
  set(1, 0, 1);
  set(1, 1, 0);
  set(2, 0, 0);
  set(2, 1, 2);
  return Cmp(S, A, std::move(p), {1.0, 0.0, 0.0}, {"middle", "left", "right"});
}

Cmp river_swim(const RiverSwimParams& params) {
  const double probs[] = {params.advance, params.stay, params.back};
  for (double q : probs)
    if (!(q >= 0.0 && q <= 1.0))
      throw Error(ErrorKind::BadParams, "river_swim probabilities must lie in [0, 1]",
                  {{"advance", params.advance}, {"stay", params.stay}, {"back", params.back}});
  const double sum = params.advance + params.stay + params.back;
  if (std::abs(sum - 1.0) > kStochasticTolerance)
    throw Error(ErrorKind::BadParams, "river_swim probabilities must sum to 1", {{"sum", sum}});

  constexpr int S = 3, A = 2;
  std::vector<double> p(S * A * S, 0.0);
  for (int s = 0; s < S; ++s) {
    p[(s * A + 0) * S + std::max(s - 1, 0)] += 1.0;
    p[(s * A + 1) * S + std::min(s + 1, S - 1)] += params.advance;
    p[(s * A + 1) * S + s] += params.stay;
    p[(s * A + 1) * S + std::max(s - 1, 0)] += params.back;
  }
  return Cmp(S, A, std::move(p), {1.0, 0.0, 0.0});
}

bool is_preset(std::string_view name) { return name == "three_state" || name == "river_swim"; }

Cmp build_preset(std::string_view name, const nlohmann::json& params) {
  if (!params.is_object()) throw Error(ErrorKind::BadParams, "preset parameters must be an object");
  if (name == "three_state") {
    double slip = 0.0;
    for (const auto& [key, value] : params.items()) {
      if (key != "slip") throw Error(ErrorKind::BadParams, "unknown three_state parameter", {{"param", key}});
      if (!value.is_number()) throw Error(ErrorKind::BadParams, "parameter must be a number", {{"param", key}});
      slip = value.get<double>();
    }
    return three_state(slip);
  }
  if (name == "river_swim") {
    RiverSwimParams rp;
    for (const auto& [key, value] : params.items()) {
      if (!value.is_number()) throw Error(ErrorKind::BadParams, "parameter must be a number", {{"param", key}});
      if (key == "advance") rp.advance = value.get<double>();
      else if (key == "stay") rp.stay = value.get<double>();
      else if (key == "back") rp.back = value.get<double>();
      else throw Error(ErrorKind::BadParams, "unknown river_swim parameter", {{"param", key}});
    }
    return river_swim(rp);
  }
  throw Error(ErrorKind::UnknownPreset, "unknown preset", {{"name", std::string(name)}});
}

}  // namespace maxent
