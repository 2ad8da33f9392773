#pragma once

#include <stdexcept>
#include <string>

namespace toricqh {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad JSON, non-primitive normal, non-positive offset,
/// redundant inequality.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// The input is well formed but an operation's precondition does not hold
/// (no vertex, not Delzant, not monotone, not compact, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A property that the theory guarantees was found to fail (torsion in a
/// graded quotient, rank mismatch, non-associative table, ...).
class PropertyFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace toricqh
