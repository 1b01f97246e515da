#pragma once

#include <stdexcept>
#include <string>

namespace doppler {

enum class ErrorCode {
    SingularMatrix,
    DimensionMismatch,
    CoincidentPoints,
    ZeroFrequency,
    InvalidScale,
    BadStartSolution,
    DegenerateDraw,
    NoProgress,
    NotSymmetric,
    IoError,
    CorruptPack,
    FamilyMismatch,
    NoCandidates,
    HyperbolicUnsupported,
    DegenerateOrbit,
    PackMissing,
    ParseError,
    InvalidArgument
};

[[nodiscard]] constexpr const char* to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::SingularMatrix: return "SingularMatrix";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::CoincidentPoints: return "CoincidentPoints";
        case ErrorCode::ZeroFrequency: return "ZeroFrequency";
        case ErrorCode::InvalidScale: return "InvalidScale";
        case ErrorCode::BadStartSolution: return "BadStartSolution";
        case ErrorCode::DegenerateDraw: return "DegenerateDraw";
        case ErrorCode::NoProgress: return "NoProgress";
        case ErrorCode::NotSymmetric: return "NotSymmetric";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::CorruptPack: return "CorruptPack";
        case ErrorCode::FamilyMismatch: return "FamilyMismatch";
        case ErrorCode::NoCandidates: return "NoCandidates";
        case ErrorCode::HyperbolicUnsupported: return "HyperbolicUnsupported";
        case ErrorCode::DegenerateOrbit: return "DegenerateOrbit";
        case ErrorCode::PackMissing: return "PackMissing";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), detail_(what) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }
    // The message without the code prefix.
    [[nodiscard]] const std::string& detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    std::string detail_;
};

} // namespace doppler
