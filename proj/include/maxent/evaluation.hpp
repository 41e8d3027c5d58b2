#pragma once

#include <cstdint>
#include <functional>

#include "maxent/cmp.hpp"
#include "maxent/count_graph.hpp"
#include "maxent/policy.hpp"
#include "maxent/rng.hpp"

namespace maxent {

struct ExactOptions {
  std::uint64_t node_cap = kDefaultNodeCap;
  /// Cap on A^(T-1) S^T for full trajectory enumeration.
  double enumeration_cap = 1e7;
};

/// s_0 ~ mu, then T-1 policy/transition steps.
History sample_trajectory(const Cmp& cmp, const Policy& policy, const EpisodeSpec& spec, Rng& rng);

/// Extends `prefix` to T states by sampling.
History sample_continuation(const Cmp& cmp, const Policy& policy, const EpisodeSpec& spec, const History& prefix,
                            Rng& rng);

using TrajectoryVisitor = std::function<void(const History&, double probability)>;

/// Calls `visit` once per positive-probability length-T history. Throws
/// CapExceeded when A^(T-1) S^T exceeds the cap.
void enumerate_trajectories(const Cmp& cmp, const Policy& policy, const EpisodeSpec& spec,
                            const TrajectoryVisitor& visit, double cap = 1e7);

/// Same, for completions of `prefix`; probabilities are conditional on it.
void enumerate_continuations(const Cmp& cmp, const Policy& policy, const EpisodeSpec& spec, const History& prefix,
                             const TrajectoryVisitor& visit, double cap = 1e7);

/// E[H(d_h)] by a forward mass sweep over the graph's nodes; the policy must
/// be count-measurable.
double expected_entropy_on_graph(const CountGraph& graph, const Policy& policy);

/// Finite-sample objective E_{h ~ p_T}[H(d_h)]. Count dynamic programming
/// for Markov and count policies; full trajectory enumeration otherwise.
double exact_expected_entropy(const Cmp& cmp, const Policy& policy, const EpisodeSpec& spec,
                              const ExactOptions& options = {});

/// E[H(d_{prefix + continuation})] with the continuation drawn from `policy`.
double expected_continuation_entropy(const Cmp& cmp, const Policy& policy, const EpisodeSpec& spec,
                                     const History& prefix, const ExactOptions& options = {});

}  // namespace maxent
