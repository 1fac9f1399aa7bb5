#include "fuelgeo/error.hpp"

namespace fuelgeo {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::InvalidBandwidth: return "invalid-bandwidth";
    case ErrorKind::DegenerateBandwidth: return "degenerate-bandwidth";
    case ErrorKind::EmptyInput: return "empty-input";
    case ErrorKind::ZeroVariance: return "zero-variance";
    case ErrorKind::EmptyWeights: return "empty-weights";
    case ErrorKind::SingularFit: return "singular-fit";
    case ErrorKind::Oversaturated: return "oversaturated-model";
    case ErrorKind::DegenerateFit: return "degenerate-fit";
    case ErrorKind::InsufficientSupport: return "insufficient-support";
    case ErrorKind::NoFeasibleBandwidth: return "no-feasible-bandwidth";
    case ErrorKind::EmptyReport: return "empty-report";
    case ErrorKind::SingularDesign: return "singular-design";
    case ErrorKind::DegenerateGrouping: return "degenerate-grouping";
    case ErrorKind::AbsorbedCovariate: return "absorbed-covariate";
    case ErrorKind::InsufficientClusters: return "insufficient-clusters";
    case ErrorKind::PoolExhausted: return "pool-exhausted";
    case ErrorKind::Parse: return "parse-error";
    case ErrorKind::DuplicateKey: return "duplicate-key";
    case ErrorKind::Store: return "store-error";
    case ErrorKind::Io: return "io-error";
    case ErrorKind::Config: return "config-error";
    }
    return "unknown";
}

} // namespace fuelgeo
