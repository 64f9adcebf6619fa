#pragma once

#include <stdexcept>
#include <string>

namespace latlab {

// Every failure the library reports derives from Error, so callers can catch
// the whole family or a single condition. Errors are always loud: no routine
// silently degrades its answer.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Input vectors are linearly dependent (some Gram-Schmidt norm vanished).
class DependentInputError : public Error {
 public:
  using Error::Error;
};

// A nonzero vector was required.
class ZeroVectorError : public Error {
 public:
  using Error::Error;
};

// A point that must lie in the lattice (integral coefficients) does not.
class NonMemberError : public Error {
 public:
  using Error::Error;
};

// Enumeration exceeded its node budget.
class BudgetExceededError : public Error {
 public:
  using Error::Error;
};

// A configured size cap (rank cap, sample cap, z-space cap) was exceeded.
class CapExceededError : public Error {
 public:
  using Error::Error;
};

// A parameter that must be prime is not.
class NotPrimeError : public Error {
 public:
  using Error::Error;
};

// estimate_via_decision received or derived an invalid bracket.
class BracketError : public Error {
 public:
  using Error::Error;
};

// An audited oracle was called above its dimension limit.
class DimensionViolationError : public Error {
 public:
  using Error::Error;
};

// A reduction obtained no valid candidate from its oracle calls.
class NoValidCandidateError : public Error {
 public:
  using Error::Error;
};

// Malformed instance file or parameter string.
class ParseError : public Error {
 public:
  using Error::Error;
};

// A parameter lies outside its documented domain.
class InvalidParameterError : public Error {
 public:
  using Error::Error;
};

}  // namespace latlab
