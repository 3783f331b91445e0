#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace curvekit {

enum class ErrorCode {
  // tensor-io
  MagicMismatch,
  ShapeMismatch,
  NonFiniteValue,
  CsvParse,
  IoFailure,
  DuplicateLayerIndex,
  OrdinalOutOfRange,
  // synthetic-manifolds
  InvalidRadius,
  InvalidSpec,
  OffSurface,
  // neighborhoods
  EmptyMaskSet,
  KTooLarge,
  InvalidImage,
  // dimension
  TooFewPoints,
  AllPointsDuplicate,
  DegenerateData,
  // caml
  RankDeficient,
  DTooLarge,
  TooFewNeighbors,
  // curvature-metrics
  EmptyInput,
  DimensionTooLarge,
  DegeneratePlane,
  WrongDimensions,
  // profile-analysis
  MisalignedBundle,
  ZeroMeanMapc,
  SizeTooLarge,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the toolkit. `code()` identifies the condition;
/// the message carries the location (byte offset, row, layer) where one exists.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace curvekit
