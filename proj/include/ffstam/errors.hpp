#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ffstam {

/// Machine-readable error categories. The CLI reports these verbatim.
enum class ErrorCategory {
    InvalidArgument,
    NonRealRoots,
    ConvergenceFailure,
    DegreeMismatch,
    RepeatedRoots,
    DegenerateConfig,
    InvalidFamilyParams,
    PrecisionExhausted,
    PrecisionUnavailable,
    DivergenceDetected,
    ProjectionFailure,
    InvalidCounts,
    EmptyElites,
    IoError,
};

inline std::string_view category_name(ErrorCategory c) noexcept {
    switch (c) {
        case ErrorCategory::InvalidArgument: return "InvalidArgument";
        case ErrorCategory::NonRealRoots: return "NonRealRoots";
        case ErrorCategory::ConvergenceFailure: return "ConvergenceFailure";
        case ErrorCategory::DegreeMismatch: return "DegreeMismatch";
        case ErrorCategory::RepeatedRoots: return "RepeatedRoots";
        case ErrorCategory::DegenerateConfig: return "DegenerateConfig";
        case ErrorCategory::InvalidFamilyParams: return "InvalidFamilyParams";
        case ErrorCategory::PrecisionExhausted: return "PrecisionExhausted";
        case ErrorCategory::PrecisionUnavailable: return "PrecisionUnavailable";
        case ErrorCategory::DivergenceDetected: return "DivergenceDetected";
        case ErrorCategory::ProjectionFailure: return "ProjectionFailure";
        case ErrorCategory::InvalidCounts: return "InvalidCounts";
        case ErrorCategory::EmptyElites: return "EmptyElites";
        case ErrorCategory::IoError: return "IoError";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& what)
        : std::runtime_error(what), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

namespace detail {

template <ErrorCategory C>
class TaggedError : public Error {
public:
    explicit TaggedError(const std::string& what) : Error(C, what) {}
};

}  // namespace detail

using InvalidArgument = detail::TaggedError<ErrorCategory::InvalidArgument>;
using NonRealRoots = detail::TaggedError<ErrorCategory::NonRealRoots>;
using ConvergenceFailure = detail::TaggedError<ErrorCategory::ConvergenceFailure>;
using DegreeMismatch = detail::TaggedError<ErrorCategory::DegreeMismatch>;
using RepeatedRoots = detail::TaggedError<ErrorCategory::RepeatedRoots>;
using DegenerateConfig = detail::TaggedError<ErrorCategory::DegenerateConfig>;
using InvalidFamilyParams = detail::TaggedError<ErrorCategory::InvalidFamilyParams>;
using PrecisionExhausted = detail::TaggedError<ErrorCategory::PrecisionExhausted>;
using PrecisionUnavailable = detail::TaggedError<ErrorCategory::PrecisionUnavailable>;
using DivergenceDetected = detail::TaggedError<ErrorCategory::DivergenceDetected>;
using ProjectionFailure = detail::TaggedError<ErrorCategory::ProjectionFailure>;
using InvalidCounts = detail::TaggedError<ErrorCategory::InvalidCounts>;
using EmptyElites = detail::TaggedError<ErrorCategory::EmptyElites>;
using IoError = detail::TaggedError<ErrorCategory::IoError>;

}  // namespace ffstam
