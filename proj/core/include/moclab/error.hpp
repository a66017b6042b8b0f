#pragma once

#include <stdexcept>
#include <string>

namespace moclab {

enum class ErrorKind {
    NonPositiveMoc,
    DiniDivergence,
    DomainExceeded,
    DerivativeUnavailable,
    FlatAlpha,
    NotStrictlyConvex,
    BlowThroughDomain,
    NotAcceptable,
    BadMuA,
    SeedShapeFailure,
    NonOsgood,
    RangeExceeded,
    PrerequisiteFailed,
    LambdaNotConcave,
    EpsilonNotInvertible,
    NotConvex,
    ConditionOneFailed,
    DegenerateBeta,
    TailDivergence,
    NonMonotone,
    QuadratureNonconvergent,
    LeftNeighborhood,
    ConfigError,
};

const char* to_string(ErrorKind kind);

// Every failure raised by the library carries one of the kinds above.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& detail);
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace moclab
