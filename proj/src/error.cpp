#include "viascope/error.hpp"

namespace viascope {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::ZeroVector: return "ZeroVector";
        case ErrorCode::BelowPlane: return "BelowPlane";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::EmptyRaster: return "EmptyRaster";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::TooFewPoints: return "TooFewPoints";
        case ErrorCode::InvalidNA: return "InvalidNA";
        case ErrorCode::InvalidIndex: return "InvalidIndex";
        case ErrorCode::NonpositiveOffset: return "NonpositiveOffset";
        case ErrorCode::OverlappingVias: return "OverlappingVias";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::MalformedHeader: return "MalformedHeader";
        case ErrorCode::UnsupportedMaxval: return "UnsupportedMaxval";
        case ErrorCode::BadMagic: return "BadMagic";
        case ErrorCode::TruncatedPayload: return "TruncatedPayload";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::IoFailure: return "IoFailure";
        case ErrorCode::RankDeficientLights: return "RankDeficientLights";
        case ErrorCode::DegenerateFit: return "DegenerateFit";
        case ErrorCode::DegenerateWeights: return "DegenerateWeights";
        case ErrorCode::CollinearPoints: return "CollinearPoints";
        case ErrorCode::NoContour: return "NoContour";
        case ErrorCode::OpenContourOnly: return "OpenContourOnly";
        case ErrorCode::NoVia: return "NoVia";
    }
    return "Unknown";
}

ErrorCategory category_of(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::RankDeficientLights:
        case ErrorCode::DegenerateFit:
        case ErrorCode::DegenerateWeights:
        case ErrorCode::CollinearPoints:
        case ErrorCode::NoContour:
        case ErrorCode::OpenContourOnly:
        case ErrorCode::NoVia:
            return ErrorCategory::Numerical;
        default:
            return ErrorCategory::Input;
    }
}

}  // namespace viascope
