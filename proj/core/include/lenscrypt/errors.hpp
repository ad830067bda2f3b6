#pragma once

#include <stdexcept>

namespace lenscrypt {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid or inconsistent configuration/arguments.
struct ConfigError : Error {
    using Error::Error;
};

// File and serialization failures.
struct IoError : Error {
    using Error::Error;
};

// Numerical failures detected at runtime.
struct NumericalError : Error {
    using Error::Error;
};

// Inversion requested on a system with vanishing frequency response.
struct IllPosedError : NumericalError {
    using NumericalError::NumericalError;
};

// Iterative solver left its stability envelope.
struct DivergenceError : NumericalError {
    using NumericalError::NumericalError;
};

}  // namespace lenscrypt
