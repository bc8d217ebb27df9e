#pragma once

#include <stdexcept>
#include <string>

namespace vm3b {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter or input lies outside the domain an operation accepts
/// (nu outside (0, 1/2], kappa <= 1, nonpositive tolerances, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A time query falls outside the span covered by a solution or mass law.
class OutOfSpanError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure could not produce a result (integration failure,
/// root finder divergence, singular configuration).
class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace vm3b
