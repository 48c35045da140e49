#pragma once

#include <stdexcept>
#include <string>

namespace synthmet {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or physically invalid input data (files, series, samples).
class DataError : public Error {
 public:
  using Error::Error;
};

/// A caller violated an operation's precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// An iterative or linear-algebra step failed (singular system, no convergence).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Conditioning could not reach its target; carries the best value seen.
class TargetNotReached : public NumericalError {
 public:
  TargetNotReached(const std::string& what, double best)
      : NumericalError(what), best_achieved(best) {}
  double best_achieved;
};

}  // namespace synthmet
