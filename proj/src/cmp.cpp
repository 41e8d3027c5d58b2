#include "maxent/cmp.hpp"

#include <cmath>
#include <charconv>
#include <numeric>
#include <sstream>

#include "maxent/error.hpp"

namespace maxent {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonStochasticRow: return "NonStochasticRow";
    case ErrorKind::NegativeEntry: return "NegativeEntry";
    case ErrorKind::BadInitial: return "BadInitial";
    case ErrorKind::NotADistribution: return "NotADistribution";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::PolicyClassMismatch: return "PolicyClassMismatch";
    case ErrorKind::HorizonMismatch: return "HorizonMismatch";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::CapExceeded: return "CapExceeded";
    case ErrorKind::PolicyNotEvaluable: return "PolicyNotEvaluable";
    case ErrorKind::MissingEntry: return "MissingEntry";
    case ErrorKind::FeatureMismatch: return "FeatureMismatch";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::InconsistentPrefix: return "InconsistentPrefix";
    case ErrorKind::TooManyParamsForGrid: return "TooManyParamsForGrid";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::UnreachableCondition: return "UnreachableCondition";
    case ErrorKind::ZeroProbabilityOptAction: return "ZeroProbabilityOptAction";
    case ErrorKind::EpisodeFinished: return "EpisodeFinished";
    case ErrorKind::BudgetZero: return "BudgetZero";
    case ErrorKind::UnknownPreset: return "UnknownPreset";
    case ErrorKind::BadParams: return "BadParams";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::CapExceeded:
    case ErrorKind::BudgetExceeded:
    case ErrorKind::TooManyParamsForGrid:
    case ErrorKind::NoConvergence:
    case ErrorKind::BudgetZero:
      return 2;
    default:
      return 1;
  }
}

nlohmann::json Error::to_json() const {
  return {{"error", std::string(to_string(kind_))}, {"message", what()}, {"details", details_}};
}

Cmp::Cmp(int num_states, int num_actions, std::vector<double> transitions, std::vector<double> initial,
         std::vector<std::string> state_labels)
    : num_states_(num_states),
      num_actions_(num_actions),
      transitions_(std::move(transitions)),
      initial_(std::move(initial)),
      labels_(std::move(state_labels)) {
  if (num_states_ < 1 || num_actions_ < 1)
    throw Error(ErrorKind::InvalidArgument, "a CMP needs at least one state and one action");
  const auto expected = static_cast<std::size_t>(num_states_) * num_actions_ * num_states_;
  if (transitions_.size() != expected)
    throw Error(ErrorKind::InvalidArgument, "transition tensor has the wrong size",
                {{"expected", expected}, {"got", transitions_.size()}});
  if (initial_.size() != static_cast<std::size_t>(num_states_))
    throw Error(ErrorKind::InvalidArgument, "initial distribution has the wrong size");
  if (!labels_.empty() && labels_.size() != static_cast<std::size_t>(num_states_))
    throw Error(ErrorKind::InvalidArgument, "state label count does not match the state count");
}

std::string Cmp::label(int s) const {
  if (labels_.empty()) return std::to_string(s);
  return labels_[static_cast<std::size_t>(s)];
}

ValidationReport validate_cmp(const Cmp& cmp) {
  ValidationReport report;
  const int S = cmp.num_states();
  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < cmp.num_actions(); ++a) {
      double sum = 0.0;
      for (int n = 0; n < S; ++n) {
        const double v = cmp.p(s, a, n);
        if (!(v >= 0.0)) report.violations.push_back({Violation::Kind::NegativeEntry, s, a, n, v});
        sum += v;
      }
      if (!(std::abs(sum - 1.0) <= kStochasticTolerance))
        report.violations.push_back({Violation::Kind::NonStochasticRow, s, a, -1, sum});
    }
  }
  double sum = 0.0;
  bool negative = false;
  for (double v : cmp.initial()) {
    negative |= !(v >= 0.0);
    sum += v;
  }
  if (negative || !(std::abs(sum - 1.0) <= kStochasticTolerance))
    report.violations.push_back({Violation::Kind::BadInitial, -1, -1, -1, sum});
  return report;
}

void require_valid(const Cmp& cmp) {
  const auto report = validate_cmp(cmp);
  if (report.ok()) return;
  auto rows = nlohmann::json::array();
  for (const auto& v : report.violations) {
    switch (v.kind) {
      case Violation::Kind::NonStochasticRow:
        rows.push_back({{"kind", "NonStochasticRow"}, {"state", v.state}, {"action", v.action}, {"sum", v.value}});
        break;
      case Violation::Kind::NegativeEntry:
        rows.push_back({{"kind", "NegativeEntry"},
                        {"index", {v.state, v.action, v.next_state}},
                        {"value", v.value}});
        break;
      case Violation::Kind::BadInitial:
        rows.push_back({{"kind", "BadInitial"}, {"sum", v.value}});
        break;
    }
  }
  const auto& first = report.violations.front();
  const ErrorKind kind = first.kind == Violation::Kind::NonStochasticRow ? ErrorKind::NonStochasticRow
                         : first.kind == Violation::Kind::NegativeEntry  ? ErrorKind::NegativeEntry
                                                                         : ErrorKind::BadInitial;
  throw Error(kind, "CMP failed validation", {{"violations", rows}});
}

void EpisodeSpec::validate() const {
  if (horizon < 1) throw Error(ErrorKind::InvalidArgument, "horizon must be at least 1", {{"horizon", horizon}});
  if (discount && !(*discount > 0.0 && *discount < 1.0))
    throw Error(ErrorKind::InvalidArgument, "discount must lie strictly inside (0,1)", {{"discount", *discount}});
}

void check_history(const Cmp& cmp, const History& h) {
  auto fail = [&](const std::string& why) {
    throw Error(ErrorKind::InconsistentPrefix, why, {{"prefix", format_history(h)}});
  };
  if (h.states.empty()) fail("prefix has no states");
  if (h.actions.size() + 1 != h.states.size()) fail("prefix needs exactly one action between consecutive states");
  for (int s : h.states)
    if (s < 0 || s >= cmp.num_states()) fail("state index out of range");
  for (int a : h.actions)
    if (a < 0 || a >= cmp.num_actions()) fail("action index out of range");
  if (!(cmp.initial()[static_cast<std::size_t>(h.states[0])] > 0.0)) fail("initial state has zero probability");
  for (std::size_t k = 0; k < h.actions.size(); ++k)
    if (!(cmp.p(h.states[k], h.actions[k], h.states[k + 1]) > 0.0)) fail("prefix contains a zero-probability transition");
}

History parse_history(std::string_view text) {
  std::vector<int> values;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find(',', pos);
    if (end == std::string_view::npos) end = text.size();
    auto token = text.substr(pos, end - pos);
    while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
    while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
    int v = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (token.empty() || ec != std::errc() || ptr != token.data() + token.size())
      throw Error(ErrorKind::InvalidArgument, "malformed history; expected \"s0,a0,s1,...\"",
                  {{"text", std::string(text)}});
    values.push_back(v);
    pos = end + 1;
  }
  if (values.size() % 2 == 0)
    throw Error(ErrorKind::InvalidArgument, "history must alternate states and actions and end on a state",
                {{"text", std::string(text)}});
  History h;
  for (std::size_t i = 0; i < values.size(); ++i) (i % 2 == 0 ? h.states : h.actions).push_back(values[i]);
  return h;
}

std::string format_history(const History& h) {
  std::ostringstream out;
  for (std::size_t i = 0; i < h.states.size(); ++i) {
    if (i > 0) out << ',' << (i - 1 < h.actions.size() ? h.actions[i - 1] : -1) << ',';
    out << h.states[i];
  }
  return out.str();
}

VisitCounts VisitCounts::of(const History& h, int num_states, int horizon) {
  VisitCounts c{std::vector<int>(static_cast<std::size_t>(num_states), 0), horizon};
  for (int s : h.states) c.add(s);
  return c;
}

int VisitCounts::total() const noexcept { return std::accumulate(counts.begin(), counts.end(), 0); }

}  // namespace maxent
