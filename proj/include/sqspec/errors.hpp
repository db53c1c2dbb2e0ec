#pragma once

#include <stdexcept>
#include <string>

namespace sqspec {

/// Failure categories surfaced by the library. The CLI maps these onto
/// process exit codes (invalid input -> 2, cross-check failure -> 3,
/// fit failure -> 4).
enum class ErrorCode {
    NonPositiveGamma,
    NegativeN,
    MOutOfRange,
    SingularSystem,
    NegativeTime,
    NegativeTau,
    DegenerateWidth,
    NonDecayedTail,
    NoHalfCrossing,
    FitDiverged,
    DegenerateSeries,
    MalformedCsv,
    InvalidFlag,
    UnwritableOutput,
    InvalidDensityMatrix,
    InvalidGrid,
    InvalidArgument,
};

inline const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::NonPositiveGamma: return "NonPositiveGamma";
        case ErrorCode::NegativeN: return "NegativeN";
        case ErrorCode::MOutOfRange: return "MOutOfRange";
        case ErrorCode::SingularSystem: return "SingularSystem";
        case ErrorCode::NegativeTime: return "NegativeTime";
        case ErrorCode::NegativeTau: return "NegativeTau";
        case ErrorCode::DegenerateWidth: return "DegenerateWidth";
        case ErrorCode::NonDecayedTail: return "NonDecayedTail";
        case ErrorCode::NoHalfCrossing: return "NoHalfCrossing";
        case ErrorCode::FitDiverged: return "FitDiverged";
        case ErrorCode::DegenerateSeries: return "DegenerateSeries";
        case ErrorCode::MalformedCsv: return "MalformedCsv";
        case ErrorCode::InvalidFlag: return "InvalidFlag";
        case ErrorCode::UnwritableOutput: return "UnwritableOutput";
        case ErrorCode::InvalidDensityMatrix: return "InvalidDensityMatrix";
        case ErrorCode::InvalidGrid: return "InvalidGrid";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "UnknownError";
}

/// Library-wide exception. what() always starts with the code name so that
/// diagnostics identify the failure category without parsing.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& detail)
        : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace sqspec
