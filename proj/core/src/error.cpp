#include "moclab/error.hpp"

namespace moclab {

const char* to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::NonPositiveMoc: return "NonPositiveMoc";
    case ErrorKind::DiniDivergence: return "DiniDivergence";
    case ErrorKind::DomainExceeded: return "DomainExceeded";
    case ErrorKind::DerivativeUnavailable: return "DerivativeUnavailable";
    case ErrorKind::FlatAlpha: return "FlatAlpha";
    case ErrorKind::NotStrictlyConvex: return "NotStrictlyConvex";
    case ErrorKind::BlowThroughDomain: return "BlowThroughDomain";
    case ErrorKind::NotAcceptable: return "NotAcceptable";
    case ErrorKind::BadMuA: return "BadMuA";
    case ErrorKind::SeedShapeFailure: return "SeedShapeFailure";
    case ErrorKind::NonOsgood: return "NonOsgood";
    case ErrorKind::RangeExceeded: return "RangeExceeded";
    case ErrorKind::PrerequisiteFailed: return "PrerequisiteFailed";
    case ErrorKind::LambdaNotConcave: return "LambdaNotConcave";
    case ErrorKind::EpsilonNotInvertible: return "EpsilonNotInvertible";
    case ErrorKind::NotConvex: return "NotConvex";
    case ErrorKind::ConditionOneFailed: return "ConditionOneFailed";
    case ErrorKind::DegenerateBeta: return "DegenerateBeta";
    case ErrorKind::TailDivergence: return "TailDivergence";
    case ErrorKind::NonMonotone: return "NonMonotone";
    case ErrorKind::QuadratureNonconvergent: return "QuadratureNonconvergent";
    case ErrorKind::LeftNeighborhood: return "LeftNeighborhood";
    case ErrorKind::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& detail)
    : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind)
{
}

}  // namespace moclab
