#pragma once

#include <stdexcept>
#include <string>

namespace pcsim {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidScenario : Error {
    using Error::Error;
};

struct DimensionError : Error {
    using Error::Error;
};

/// A pair whose direct-link gain is zero can never reach a positive SINR.
struct DegenerateLink : Error {
    using Error::Error;
};

struct ProtocolViolation : Error {
    using Error::Error;
};

struct FilterExhausted : Error {
    using Error::Error;
};

/// Malformed persisted artifact (scenario file, run log).
struct FormatError : Error {
    using Error::Error;
};

}  // namespace pcsim
