#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

namespace maxent {

enum class ErrorKind {
  NonStochasticRow,
  NegativeEntry,
  BadInitial,
  NotADistribution,
  LengthMismatch,
  PolicyClassMismatch,
  HorizonMismatch,
  NoConvergence,
  CapExceeded,
  PolicyNotEvaluable,
  MissingEntry,
  FeatureMismatch,
  SchemaError,
  InconsistentPrefix,
  TooManyParamsForGrid,
  BudgetExceeded,
  UnreachableCondition,
  ZeroProbabilityOptAction,
  EpisodeFinished,
  BudgetZero,
  UnknownPreset,
  BadParams,
  InvalidArgument,
  Io,
};

std::string_view to_string(ErrorKind kind);

/// Process exit code for an error escaping the CLI: 2 for cap/budget
/// exhaustion, 1 for everything else (validation and input errors).
int exit_code(ErrorKind kind);

/// Single exception type for the library. `details` carries structured
/// context (offending row, node, sums) for machine-readable reporting.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, nlohmann::json details = nlohmann::json::object())
      : std::runtime_error(message), kind_(kind), details_(std::move(details)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const nlohmann::json& details() const noexcept { return details_; }

  /// {"error": kind, "message": ..., "details": {...}}
  nlohmann::json to_json() const;

 private:
  ErrorKind kind_;
  nlohmann::json details_;
};

}  // namespace maxent
