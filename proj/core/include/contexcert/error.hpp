#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace contexcert {

enum class ErrorCode {
  InvalidArgument,
  // scenario
  InvalidScenario,
  InvalidRecord,
  UnknownSetting,
  IncompatibleSetting,
  NotSubset,
  WrongArity,
  NonDichotomous,
  InvalidTable,
  // signaling
  ObservableNotFound,
  FewerThanTwoContexts,
  NoSharedObservables,
  // belltests
  MissingPair,
  ZeroMeanViolated,
  CorrelationConstraintUnmet,
  // jpdoracle
  TooManyVariables,
  InconsistentConstraints,
  // quantumgen
  NonCommuting,
  InvalidState,
  InvalidObservable,
  // randomtests
  UnknownLabel,
  BadCheckpoints,
  EmptySelection,
  AllSelectionsInconclusive,
  // io
  ParseError,
  ValidationError,
  IoError,
  // suite
  MissingSettings,
};

std::string_view to_string(ErrorCode code);

// All failures raised by the library carry a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace contexcert
