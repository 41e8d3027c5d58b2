#pragma once

#include <span>

#include "maxent/cmp.hpp"

namespace maxent {

/// Shannon entropy in nats with 0 log 0 = 0. Throws NotADistribution unless
/// `dist` is nonnegative and sums to 1 within 1e-8.
double entropy(std::span<const double> dist);

/// Entropy of counts / horizon, i.e. H(d_h) of a finished episode.
/// Assumes the counts sum to `horizon`.
double count_entropy(std::span<const int> counts, int horizon);

/// d_h for a history of exactly T states.
StateDistribution visitation_frequency(const History& h, const Cmp& cmp, const EpisodeSpec& spec);

}  // namespace maxent
