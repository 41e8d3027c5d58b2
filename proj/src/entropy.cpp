#include "maxent/entropy.hpp"

#include <cmath>

#include "maxent/error.hpp"

namespace maxent {

double entropy(std::span<const double> dist) {
  double sum = 0.0;
  for (double p : dist) {
    if (!(p >= 0.0)) throw Error(ErrorKind::NotADistribution, "negative probability", {{"value", p}});
    sum += p;
  }
  if (!(std::abs(sum - 1.0) <= 1e-8)) throw Error(ErrorKind::NotADistribution, "probabilities do not sum to 1", {{"sum", sum}});
  double h = 0.0;
  for (double p : dist)
    if (p > 0.0) h -= p * std::log(p);
  return h < 0.0 ? 0.0 : h;
}

double count_entropy(std::span<const int> counts, int horizon) {
  const double total = horizon;
  double h = 0.0;
  for (int c : counts) {
    if (c > 0) {
      const double p = c / total;
      h -= p * std::log(p);
    }
  }
  return h < 0.0 ? 0.0 : h;
}

StateDistribution visitation_frequency(const History& h, const Cmp& cmp, const EpisodeSpec& spec) {
  if (h.states.size() != static_cast<std::size_t>(spec.horizon))
    throw Error(ErrorKind::LengthMismatch, "history length differs from the horizon",
                {{"length", h.states.size()}, {"horizon", spec.horizon}});
  StateDistribution d{std::vector<double>(static_cast<std::size_t>(cmp.num_states()), 0.0), DistributionKind::Visitation};
  for (int s : h.states) {
    if (s < 0 || s >= cmp.num_states()) throw Error(ErrorKind::InvalidArgument, "state index out of range", {{"state", s}});
    d.probabilities[static_cast<std::size_t>(s)] += 1.0;
  }
  for (double& p : d.probabilities) p /= spec.horizon;
  return d;
}

}  // namespace maxent
