#pragma once

#include <stdexcept>

namespace pv {

// Caller-supplied value violates an operation's contract.
struct InvalidArgument : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Frame/model/mask sizes disagree.
struct DimensionMismatch : InvalidArgument {
    using InvalidArgument::InvalidArgument;
};

// Unreadable or malformed file/stream.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Unparseable or out-of-range configuration.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Operation invoked before its prerequisites exist.
struct StateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace pv
