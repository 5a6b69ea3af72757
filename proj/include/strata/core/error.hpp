#pragma once

#include <stdexcept>
#include <string>

namespace strata {

/// Machine-readable error codes. Grouped by exit-code category:
/// config errors map to exit 2, data/model errors to exit 3,
/// NoRunnableCells to exit 4.
enum class ErrCode {
  // config
  SchemaError,
  ConstraintError,
  InvalidStrategySpec,
  // data / pipeline / model
  MissingColumn,
  ParseError,
  EmptyDataset,
  DuplicateKey,
  SeriesTooShort,
  NotAligned,
  ZeroDivision,
  ZeroAnchor,
  OrdinalTimestamps,
  UnknownSeries,
  MissingAnchor,
  MissingCovariates,
  InsufficientHistory,
  InsufficientLags,
  TooFewSamples,
  DimensionMismatch,
  SingularSystem,
  LengthMismatch,
  TooShortForFolds,
  TooShortForBacktest,
  DegenerateGroup,
  EmptyReport,
  IoError,
  ValidationFailed,
  // sweep
  NoRunnableCells,
};

inline const char* to_string(ErrCode code) {
  switch (code) {
    case ErrCode::SchemaError: return "SchemaError";
    case ErrCode::ConstraintError: return "ConstraintError";
    case ErrCode::InvalidStrategySpec: return "InvalidStrategySpec";
    case ErrCode::MissingColumn: return "MissingColumn";
    case ErrCode::ParseError: return "ParseError";
    case ErrCode::EmptyDataset: return "EmptyDataset";
    case ErrCode::DuplicateKey: return "DuplicateKey";
    case ErrCode::SeriesTooShort: return "SeriesTooShort";
    case ErrCode::NotAligned: return "NotAligned";
    case ErrCode::ZeroDivision: return "ZeroDivision";
    case ErrCode::ZeroAnchor: return "ZeroAnchor";
    case ErrCode::OrdinalTimestamps: return "OrdinalTimestamps";
    case ErrCode::UnknownSeries: return "UnknownSeries";
    case ErrCode::MissingAnchor: return "MissingAnchor";
    case ErrCode::MissingCovariates: return "MissingCovariates";
    case ErrCode::InsufficientHistory: return "InsufficientHistory";
    case ErrCode::InsufficientLags: return "InsufficientLags";
    case ErrCode::TooFewSamples: return "TooFewSamples";
    case ErrCode::DimensionMismatch: return "DimensionMismatch";
    case ErrCode::SingularSystem: return "SingularSystem";
    case ErrCode::LengthMismatch: return "LengthMismatch";
    case ErrCode::TooShortForFolds: return "TooShortForFolds";
    case ErrCode::TooShortForBacktest: return "TooShortForBacktest";
    case ErrCode::DegenerateGroup: return "DegenerateGroup";
    case ErrCode::EmptyReport: return "EmptyReport";
    case ErrCode::IoError: return "IoError";
    case ErrCode::ValidationFailed: return "ValidationFailed";
    case ErrCode::NoRunnableCells: return "NoRunnableCells";
  }
  return "UnknownError";
}

/// Exception type carrying a stable error code alongside the message.
class Error : public std::runtime_error {
public:
  Error(ErrCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrCode code() const noexcept { return code_; }

  bool is_config_error() const noexcept {
    return code_ == ErrCode::SchemaError || code_ == ErrCode::ConstraintError ||
           code_ == ErrCode::InvalidStrategySpec;
  }

private:
  ErrCode code_;
};

[[noreturn]] inline void raise(ErrCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, ErrCode code, const std::string& message) {
  if (!condition) raise(code, message);
}

}  // namespace strata
