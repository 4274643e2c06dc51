#include "omtl/error.hpp"

namespace omtl {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidMatrix: return "InvalidMatrix";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::NotPositiveSemidefinite: return "NotPositiveSemidefinite";
    case ErrorCode::InsufficientRows: return "InsufficientRows";
    case ErrorCode::UnknownTask: return "UnknownTask";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidSegment: return "InvalidSegment";
    case ErrorCode::InvalidSpectrum: return "InvalidSpectrum";
    case ErrorCode::DegenerateBand: return "DegenerateBand";
    case ErrorCode::MissingChannel: return "MissingChannel";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::LabelError: return "LabelError";
    case ErrorCode::EmptyCell: return "EmptyCell";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace omtl
