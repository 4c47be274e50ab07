#include "rdbia/errors.hpp"

namespace rdbia {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotStochastic: return "NotStochastic";
    case ErrorCode::NotPrimitive: return "NotPrimitive";
    case ErrorCode::BadInitial: return "BadInitial";
    case ErrorCode::NonzeroDiagonal: return "NonzeroDiagonal";
    case ErrorCode::ZeroOffDiagonal: return "ZeroOffDiagonal";
    case ErrorCode::NegativeEntry: return "NegativeEntry";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::BlockTooLarge: return "BlockTooLarge";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::AlphabetTooLarge: return "AlphabetTooLarge";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::PreconditionFailed: return "PreconditionFailed";
    case ErrorCode::CurveInvariantViolated: return "CurveInvariantViolated";
    case ErrorCode::BadArgument: return "BadArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

}  // namespace rdbia
