#pragma once

#include <stdexcept>
#include <string>

namespace nekmini {

// Base of every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidOrderError : public Error {
 public:
  using Error::Error;
};

// Violated API precondition (length mismatch, order mismatch, ...).
class ContractError : public Error {
 public:
  using Error::Error;
};

class InvertedElementError : public Error {
 public:
  InvertedElementError(long element, const std::string& what)
      : Error(what), element_(element) {}
  long element() const { return element_; }

 private:
  long element_;
};

class DegenerateElementError : public Error {
 public:
  DegenerateElementError(long element, const std::string& what)
      : Error(what), element_(element) {}
  long element() const { return element_; }

 private:
  long element_;
};

class AmbiguousIdError : public Error {
 public:
  using Error::Error;
};

class SetupError : public Error {
 public:
  using Error::Error;
};

class RoutingError : public Error {
 public:
  using Error::Error;
};

class BreakdownError : public Error {
 public:
  using Error::Error;
};

class StabilityError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  ConfigError(int line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Raised when a collective operation is interrupted because another rank failed.
class AbortedError : public Error {
 public:
  using Error::Error;
};

class NonConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace nekmini
