#pragma once

#include <stdexcept>
#include <string>

namespace mixdyn {

// Exit-code families used by the CLI: ConfigError -> 2, NumericError -> 3,
// IoError -> 4.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MissingColumnError : ConfigError {
  using ConfigError::ConfigError;
};

struct NonSymmetricError : NumericError {
  using NumericError::NumericError;
};
struct NoConvergenceError : NumericError {
  using NumericError::NumericError;
};
struct OverflowError : NumericError {
  using NumericError::NumericError;
};
struct InvalidIntervalError : NumericError {
  using NumericError::NumericError;
};
struct DimensionMismatchError : NumericError {
  using NumericError::NumericError;
};
struct EmptyDatasetError : NumericError {
  using NumericError::NumericError;
};
struct SupportViolationError : NumericError {
  using NumericError::NumericError;
};
struct LabelMismatchError : NumericError {
  using NumericError::NumericError;
};
struct RankDeficientError : NumericError {
  using NumericError::NumericError;
};
struct UnderdeterminedError : NumericError {
  using NumericError::NumericError;
};
struct StepTooLargeError : NumericError {
  using NumericError::NumericError;
};
struct DivergedError : NumericError {
  using NumericError::NumericError;
};
struct NotUnimodalError : NumericError {
  using NumericError::NumericError;
};
struct SeriesTooShortError : NumericError {
  using NumericError::NumericError;
};
struct UnsupportedLawError : NumericError {
  using NumericError::NumericError;
};
struct InconsistentCaseError : NumericError {
  using NumericError::NumericError;
};

}  // namespace mixdyn
