#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace shum {

enum class ErrorCode {
  InvalidArgument,
  IoError,
  MissingColumn,
  FewerThanTwoCategories,
  EmptyCategory,
  UnparseableNumeric,
  DimensionMismatch,
  IndexOutOfRange,
  InstanceTooLarge,
  EmptyInput,
  NonPositiveLambda,
  NonFiniteObjective,
  SmoothObjectiveRequired,
  SingularCovariance,
  WrongCategoryCount,
  NotPositiveDefinite,
  InvalidParameter,
  BootstrapUnstable,
  StudyUnstable,
  VerificationMismatch,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Library-wide exception. Every failure carries a machine-readable code so
/// the CLI can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace shum
