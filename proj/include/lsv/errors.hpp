#pragma once

#include <stdexcept>
#include <string>

namespace lsv {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad inputs: malformed files, parameter-range violations, arbitrage violations.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Calibration did not converge (floored-node budget exceeded, estimator breakdown).
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// File-system / serialization failures.
class IoError : public Error {
public:
    using Error::Error;
};

/// Estimator has no particle mass at the requested strike.
class NoMassError : public Error {
public:
    using Error::Error;
};

} // namespace lsv
