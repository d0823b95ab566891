#pragma once

#include <stdexcept>
#include <string>

namespace frontload {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A precondition on the inputs was violated (bad parameter, wrong regime).
class DomainError : public Error {
public:
  using Error::Error;
};

/// The working precision cannot represent the requested computation.
class PrecisionError : public Error {
public:
  using Error::Error;
};

/// The sampling grid does not contain the relevant support of a wave.
class GridError : public Error {
public:
  using Error::Error;
};

/// A quadrature or refinement loop failed to converge.
class ConvergenceError : public Error {
public:
  using Error::Error;
};

/// A kernel computed on a finite momentum window leaks into x < 0.
class CausalityError : public Error {
public:
  using Error::Error;
};

}  // namespace frontload
