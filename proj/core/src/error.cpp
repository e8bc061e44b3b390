#include "contexcert/error.hpp"

namespace contexcert {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidScenario: return "InvalidScenario";
    case ErrorCode::InvalidRecord: return "InvalidRecord";
    case ErrorCode::UnknownSetting: return "UnknownSetting";
    case ErrorCode::IncompatibleSetting: return "IncompatibleSetting";
    case ErrorCode::NotSubset: return "NotSubset";
    case ErrorCode::WrongArity: return "WrongArity";
    case ErrorCode::NonDichotomous: return "NonDichotomous";
    case ErrorCode::InvalidTable: return "InvalidTable";
    case ErrorCode::ObservableNotFound: return "ObservableNotFound";
    case ErrorCode::FewerThanTwoContexts: return "FewerThanTwoContexts";
    case ErrorCode::NoSharedObservables: return "NoSharedObservables";
    case ErrorCode::MissingPair: return "MissingPair";
    case ErrorCode::ZeroMeanViolated: return "ZeroMeanViolated";
    case ErrorCode::CorrelationConstraintUnmet: return "CorrelationConstraintUnmet";
    case ErrorCode::TooManyVariables: return "TooManyVariables";
    case ErrorCode::InconsistentConstraints: return "InconsistentConstraints";
    case ErrorCode::NonCommuting: return "NonCommuting";
    case ErrorCode::InvalidState: return "InvalidState";
    case ErrorCode::InvalidObservable: return "InvalidObservable";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::BadCheckpoints: return "BadCheckpoints";
    case ErrorCode::EmptySelection: return "EmptySelection";
    case ErrorCode::AllSelectionsInconclusive: return "AllSelectionsInconclusive";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::MissingSettings: return "MissingSettings";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace contexcert
