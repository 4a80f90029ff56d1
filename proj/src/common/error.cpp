#include "common/error.hpp"

namespace hoi {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Internal: return "Internal";
    case ErrorCode::Schema: return "SchemaError";
    case ErrorCode::Io: return "IoError";
    case ErrorCode::Shape: return "ShapeError";
    case ErrorCode::NonWatertight: return "NonWatertight";
    case ErrorCode::BehindCamera: return "BehindCamera";
    case ErrorCode::NoForeground: return "NoForeground";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::Degenerate: return "Degenerate";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::Schema:
    case ErrorCode::Io:
    case ErrorCode::InvalidArgument:
    case ErrorCode::NonWatertight:
      return 2;
    case ErrorCode::Shape:
    case ErrorCode::LengthMismatch:
    case ErrorCode::BehindCamera:
    case ErrorCode::NoForeground:
    case ErrorCode::EmptySet:
    case ErrorCode::Degenerate:
    case ErrorCode::InsufficientSamples:
    case ErrorCode::NotPSD:
      return 3;
    case ErrorCode::Internal:
      return 1;
  }
  return 1;
}

}  // namespace hoi
