#pragma once

#include <stdexcept>
#include <string>

namespace shrinkmc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Inputs with incompatible sizes (vector lengths, group sizes, matrix shapes).
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A parameter outside its domain: non-positive scale, non-finite value, ...
class DomainError : public Error {
public:
    using Error::Error;
};

/// Factorization failure or a non-finite quantity produced during computation.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Raised by the chain driver; carries the iteration at which a step failed.
class ChainError : public NumericalError {
public:
    ChainError(long iteration, const std::string& what)
        : NumericalError("iteration " + std::to_string(iteration) + ": " + what),
          iteration_(iteration) {}

    long iteration() const noexcept { return iteration_; }

private:
    long iteration_;
};

}  // namespace shrinkmc
