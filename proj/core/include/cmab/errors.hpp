#pragma once

#include <stdexcept>
#include <string>

namespace cmab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numeric argument is outside its documented domain.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A super arm or vector does not belong to the instance it was used with.
class InstanceMismatchError : public Error {
 public:
  using Error::Error;
};

/// The instance family does not support the requested operation.
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// An enumeration would exceed its size guard.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// The combinatorial problem has no feasible solution (disconnected graph, unreachable node, ...).
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// The learner received feedback that is inconsistent with what it played.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

class NotApplicableError : public Error {
 public:
  using Error::Error;
};

class NoAttackableTargetError : public Error {
 public:
  using Error::Error;
};

/// A seeded generator ran out of retries.
class GenerationError : public Error {
 public:
  using Error::Error;
};

/// Malformed input text. Carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Input parsed but a value is outside its valid range.
class ValidationError : public ParseError {
 public:
  using ParseError::ParseError;
};

}  // namespace cmab
