#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bdstab {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A state or vector outside the domain of an operation (origin, negative
/// coordinate, zero drift in a separation problem).
class DomainError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Precondition of an operation was not met by the caller.
class ContractError : public Error {
 public:
  using Error::Error;
};

class Unsupported : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(what + " at line " + std::to_string(line) + ", column " + std::to_string(column)),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Raised when a rate expression cannot be evaluated (log of a negative
/// number, division by zero, non-finite result).
class EvalError : public Error {
 public:
  EvalError(const std::string& what, std::string subexpression)
      : Error(what + " in '" + subexpression + "'"), subexpression_(std::move(subexpression)) {}

  const std::string& subexpression() const { return subexpression_; }

 private:
  std::string subexpression_;
};

/// Scenario document violates the schema. `pointer` is a JSON pointer to the
/// offending value.
class SchemaError : public Error {
 public:
  SchemaError(const std::string& pointer, const std::string& what)
      : Error(pointer + ": " + what), pointer_(pointer) {}

  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

class HomogeneityError : public Error {
 public:
  using Error::Error;
};

}  // namespace bdstab
