#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fuelgeo {

enum class ErrorKind {
    InvalidArgument,
    InvalidBandwidth,
    DegenerateBandwidth,
    EmptyInput,
    ZeroVariance,
    EmptyWeights,
    SingularFit,
    Oversaturated,
    DegenerateFit,
    InsufficientSupport,
    NoFeasibleBandwidth,
    EmptyReport,
    SingularDesign,
    DegenerateGrouping,
    AbsorbedCovariate,
    InsufficientClusters,
    PoolExhausted,
    Parse,
    DuplicateKey,
    Store,
    Io,
    Config,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Single exception type for the library; callers dispatch on kind().
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace fuelgeo
