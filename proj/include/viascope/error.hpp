#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace viascope {

enum class ErrorCode {
    // input / configuration
    ZeroVector,
    BelowPlane,
    ShapeMismatch,
    EmptyRaster,
    InvalidArgument,
    TooFewPoints,
    InvalidNA,
    InvalidIndex,
    NonpositiveOffset,
    OverlappingVias,
    DimensionMismatch,
    MalformedHeader,
    UnsupportedMaxval,
    BadMagic,
    TruncatedPayload,
    LengthMismatch,
    IoFailure,
    // numerical
    RankDeficientLights,
    DegenerateFit,
    DegenerateWeights,
    CollinearPoints,
    NoContour,
    OpenContourOnly,
    NoVia,
};

enum class ErrorCategory { Input, Numerical };

std::string_view to_string(ErrorCode code) noexcept;
ErrorCategory category_of(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }
    ErrorCategory category() const noexcept { return category_of(code_); }

private:
    ErrorCode code_;
};

}  // namespace viascope
