#pragma once

#include <vector>

#include "maxent/cmp.hpp"
#include "maxent/evaluation.hpp"
#include "maxent/policy.hpp"

namespace maxent {

/// Joint state-action distributions d_t(s, a) for t in [0, T-2], each a flat
/// S x A table. Count dynamic programming for count-measurable policies,
/// trajectory enumeration otherwise.
std::vector<std::vector<double>> state_action_occupancy(const Cmp& cmp, const Policy& policy, const EpisodeSpec& spec,
                                                        const ExactOptions& options = {});

/// Markov policy with pi'_t(a|s) = d_t(s,a) / d_t(s), uniform where d_t(s) = 0.
/// It induces the same step distributions d_t as `policy` for every t.
MarkovTimeVaryingPolicy markovianize(const Cmp& cmp, const Policy& policy, const EpisodeSpec& spec,
                                     const ExactOptions& options = {});

}  // namespace maxent
