#include "wzsentinel/error.hpp"

namespace wz {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::NonNumericField: return "NonNumericField";
    case ErrorCode::InvalidField: return "InvalidField";
    case ErrorCode::FrameOutOfRange: return "FrameOutOfRange";
    case ErrorCode::TimestampMismatch: return "TimestampMismatch";
    case ErrorCode::NonContiguousTrackIds: return "NonContiguousTrackIds";
    case ErrorCode::DuplicateFrame: return "DuplicateFrame";
    case ErrorCode::FrameGap: return "FrameGap";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::BadFileName: return "BadFileName";
    case ErrorCode::WindowTooLong: return "WindowTooLong";
    case ErrorCode::InvalidLambda: return "InvalidLambda";
    case ErrorCode::InvalidThreshold: return "InvalidThreshold";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ModeCountMismatch: return "ModeCountMismatch";
    case ErrorCode::VehicleMismatch: return "VehicleMismatch";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::AsymmetricAdjacency: return "AsymmetricAdjacency";
    case ErrorCode::DegenerateBoundary: return "DegenerateBoundary";
    case ErrorCode::OffMap: return "OffMap";
    case ErrorCode::InfeasibleStrategy: return "InfeasibleStrategy";
    case ErrorCode::EmptyHistory: return "EmptyHistory";
    case ErrorCode::HorizonTooShort: return "HorizonTooShort";
    case ErrorCode::InvalidShape: return "InvalidShape";
    case ErrorCode::DensityUnreachable: return "DensityUnreachable";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace wz
