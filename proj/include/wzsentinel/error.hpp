#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wz {

enum class ErrorCode {
  // trajdata
  MissingColumn,
  NonNumericField,
  InvalidField,
  FrameOutOfRange,
  TimestampMismatch,
  NonContiguousTrackIds,
  DuplicateFrame,
  FrameGap,
  EmptyFile,
  BadFileName,
  WindowTooLong,
  // conflict / metrics
  InvalidLambda,
  InvalidThreshold,
  LengthMismatch,
  ModeCountMismatch,
  VehicleMismatch,
  // map
  SchemaError,
  AsymmetricAdjacency,
  DegenerateBoundary,
  OffMap,
  InfeasibleStrategy,
  // predict
  EmptyHistory,
  HorizonTooShort,
  InvalidShape,
  // sim
  DensityUnreachable,
  ConfigError,
  // shared
  InvalidArgument,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it to a stable exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace wz
