#include "curvekit/error.hpp"

namespace curvekit {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MagicMismatch: return "MagicMismatch";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::CsvParse: return "CsvParse";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::DuplicateLayerIndex: return "DuplicateLayerIndex";
    case ErrorCode::OrdinalOutOfRange: return "OrdinalOutOfRange";
    case ErrorCode::InvalidRadius: return "InvalidRadius";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::OffSurface: return "OffSurface";
    case ErrorCode::EmptyMaskSet: return "EmptyMaskSet";
    case ErrorCode::KTooLarge: return "KTooLarge";
    case ErrorCode::InvalidImage: return "InvalidImage";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::AllPointsDuplicate: return "AllPointsDuplicate";
    case ErrorCode::DegenerateData: return "DegenerateData";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::DTooLarge: return "DTooLarge";
    case ErrorCode::TooFewNeighbors: return "TooFewNeighbors";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::DegeneratePlane: return "DegeneratePlane";
    case ErrorCode::WrongDimensions: return "WrongDimensions";
    case ErrorCode::MisalignedBundle: return "MisalignedBundle";
    case ErrorCode::ZeroMeanMapc: return "ZeroMeanMapc";
    case ErrorCode::SizeTooLarge: return "SizeTooLarge";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace curvekit
