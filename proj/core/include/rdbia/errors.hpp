#pragma once

#include <stdexcept>
#include <string>

namespace rdbia {

enum class ErrorCode {
  NotStochastic,
  NotPrimitive,
  BadInitial,
  NonzeroDiagonal,
  ZeroOffDiagonal,
  NegativeEntry,
  LengthMismatch,
  OutOfRange,
  BlockTooLarge,
  ShapeMismatch,
  NoConvergence,
  AlphabetTooLarge,
  DomainError,
  PreconditionFailed,
  CurveInvariantViolated,
  BadArgument,
  ParseError,
  IoError,
};

const char* error_code_name(ErrorCode code);

// All rdbia failures surface as this exception; code() lets callers branch
// without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rdbia
