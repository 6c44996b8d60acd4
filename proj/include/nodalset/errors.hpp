#pragma once

#include <stdexcept>
#include <string>

namespace nodalset {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A documented precondition was violated by the caller.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Malformed or schema-violating configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A numerical procedure could not produce a trustworthy answer
/// (bracket failure, step underflow, iteration cap, degenerate quotient).
class NumericalError : public Error {
public:
    using Error::Error;
};

/// H fell below the floor where a quotient by H was requested.
class DegenerateDenominator : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// A request lies outside the regime where a construction is available.
class OutOfRegime : public Error {
public:
    using Error::Error;
};

}  // namespace nodalset
