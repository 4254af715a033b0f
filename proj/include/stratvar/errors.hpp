#pragma once

#include <stdexcept>
#include <string>

namespace stratvar {

enum class ErrorCode {
  NonPartition,
  SizeMismatch,
  BadTreatedCount,
  NonFinite,
  EmptyCluster,
  LengthMismatch,
  SupportTooLarge,
  TooFewStrata,
  SingletonArm,
  RankDeficient,
  LeverageOne,
  BadAlpha,
  OutOfRange,
  OddCount,
  MultivariateUnsupported,
  NoCovariates,
  TooLarge,
  ParseError,
  UsageError,
};

const char* error_name(ErrorCode code);

/// Domain-rule violation. The CLI prints name() on stderr and exits 1.
class DomainError : public std::runtime_error {
 public:
  DomainError(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(error_name(code)) + ": " + detail),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  const char* name() const noexcept { return error_name(code_); }

 private:
  ErrorCode code_;
};

}  // namespace stratvar
