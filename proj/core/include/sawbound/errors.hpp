#pragma once

#include <stdexcept>
#include <string>

namespace sawbound {

// Base class for all library errors. Subtypes exist so callers can map
// failure kinds to exit codes or retries without string matching.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// (name, scheme) pair not in the builtin set.
class UnknownLatticeError : public Error {
 public:
  using Error::Error;
};

// A coordinate that does not belong to any vertex class.
class OffLatticeError : public Error {
 public:
  using Error::Error;
};

// Enumeration or matrix build exceeded its configured node budget.
class BudgetExceededError : public Error {
 public:
  using Error::Error;
};

// Monomial division requested on a non-divisible term.
class ExactDivisionError : public Error {
 public:
  using Error::Error;
};

// Polynomial evaluation overflowed to infinity.
class EvalOverflowError : public Error {
 public:
  using Error::Error;
};

// An operation whose hypothesis is primitivity was invoked on a
// non-primitive matrix.
class NotPrimitiveError : public Error {
 public:
  using Error::Error;
};

// Power iteration failed to certify the eigenvalue within the cap.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// Malformed, truncated, or corrupted input file.
class ParseError : public Error {
 public:
  using Error::Error;
};

// An argument violates a documented precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace sawbound
