#pragma once

#include <stdexcept>
#include <string>

namespace roadsim {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Scenario construction
struct InfeasibleDensity : Error {
    using Error::Error;
};
struct ShareMismatch : Error {
    using Error::Error;
};
struct SpeedAtOrAboveDesired : Error {
    using Error::Error;
};

// Dynamics
struct NonPositiveGap : Error {
    using Error::Error;
};

// Perception
struct HistoryTooShallow : Error {
    using Error::Error;
};

// Metrics
struct EmptySampleSet : Error {
    using Error::Error;
};

// Cost-benefit engine
struct DegenerateFit : Error {
    using Error::Error;
};
struct ZeroDenominator : Error {
    using Error::Error;
};

// Config files; message carries the offending field path.
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace roadsim
