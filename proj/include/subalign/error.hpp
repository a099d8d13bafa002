#pragma once

#include <stdexcept>
#include <string>

namespace subalign {

// Error categories map 1:1 onto CLI exit codes.
enum class ErrorKind { Validation = 1, Infeasible = 2, Io = 3 };

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

/// Input violates a documented precondition or invariant.
class ValidationError : public Error {
public:
  explicit ValidationError(std::string message)
      : Error(ErrorKind::Validation, std::move(message)) {}
};

/// Input cannot be deserialized (malformed document).
class ParseError : public ValidationError {
public:
  explicit ParseError(std::string message) : ValidationError(std::move(message)) {}
};

/// The optimization problem has no solution under the given constraints.
class InfeasibleError : public Error {
public:
  explicit InfeasibleError(std::string message)
      : Error(ErrorKind::Infeasible, std::move(message)) {}
};

class IoError : public Error {
public:
  explicit IoError(std::string message) : Error(ErrorKind::Io, std::move(message)) {}
};

}  // namespace subalign
