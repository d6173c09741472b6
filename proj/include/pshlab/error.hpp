#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pshlab {

enum class ErrorKind {
    InvalidDomain,
    EmptySet,
    NotCompactlyContained,
    UnsupportedMeasure,
    UnsupportedSet,
    InvalidRadii,
    Unconverged,
    UnsupportedToric,
    EmptyRegion,
    PoolExhausted,
    TooFewPoints,
    Arity,
    NearConstant,
    EmptyCorpus,
    Geometry,
    ZeroMeasure,
    NeedsScan,
    SandwichUnavailable,
    InvalidConfig,
};

inline std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidDomain: return "invalid-domain";
        case ErrorKind::EmptySet: return "empty-set";
        case ErrorKind::NotCompactlyContained: return "not-compactly-contained";
        case ErrorKind::UnsupportedMeasure: return "unsupported-measure";
        case ErrorKind::UnsupportedSet: return "unsupported-set";
        case ErrorKind::InvalidRadii: return "invalid-radii";
        case ErrorKind::Unconverged: return "unconverged";
        case ErrorKind::UnsupportedToric: return "unsupported-toric";
        case ErrorKind::EmptyRegion: return "empty-region";
        case ErrorKind::PoolExhausted: return "pool-exhausted";
        case ErrorKind::TooFewPoints: return "too-few-points";
        case ErrorKind::Arity: return "arity";
        case ErrorKind::NearConstant: return "near-constant";
        case ErrorKind::EmptyCorpus: return "empty-corpus";
        case ErrorKind::Geometry: return "geometry";
        case ErrorKind::ZeroMeasure: return "zero-measure";
        case ErrorKind::NeedsScan: return "needs-scan";
        case ErrorKind::SandwichUnavailable: return "sandwich-unavailable";
        case ErrorKind::InvalidConfig: return "invalid-config";
    }
    return "unknown";
}

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace pshlab
