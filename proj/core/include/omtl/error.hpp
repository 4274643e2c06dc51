#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace omtl {

enum class ErrorCode {
  InvalidMatrix,
  NotPositiveDefinite,
  NotPositiveSemidefinite,
  InsufficientRows,
  UnknownTask,
  DimensionMismatch,
  InvalidSegment,
  InvalidSpectrum,
  DegenerateBand,
  MissingChannel,
  ParseError,
  LabelError,
  EmptyCell,
  ConfigError,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library; `code()` tells callers which
/// contract was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace omtl
