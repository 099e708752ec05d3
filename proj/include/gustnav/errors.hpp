#pragma once

#include <stdexcept>
#include <string>

namespace gustnav {

/// Base type for all errors raised by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Caller passed a value outside an operation's input domain (non-finite state, dt <= 0, ...).
struct InputError : Error {
    using Error::Error;
};

/// Invalid or inconsistent configuration (scenario file, noise setup, GA settings).
struct ConfigError : Error {
    using Error::Error;
};

/// Numerical failure at runtime (singular innovation covariance, unfactorizable covariance).
struct NumericsError : Error {
    using Error::Error;
};

/// Filesystem/serialization failure; message includes the offending path.
struct IoError : Error {
    using Error::Error;
};

} // namespace gustnav
