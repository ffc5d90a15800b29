#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace tabkit {

/// Base class of every error raised by the engine. Logical failure is never
/// reported through exceptions; these signal misuse or ill-formed input.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t line, std::size_t column, const std::string& message)
      : Error("syntax error at line " + std::to_string(line) + ", column " +
              std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class InstantiationError : public Error {
 public:
  using Error::Error;
};

class TypeError : public Error {
 public:
  using Error::Error;
};

class EvaluationError : public Error {
 public:
  using Error::Error;
};

class UnknownPredicate : public Error {
 public:
  using Error::Error;
};

/// A shift reached the bottom of the goal stack without meeting a reset for
/// its prompt.
class UnhandledShift : public Error {
 public:
  using Error::Error;
};

class ArityMismatch : public Error {
 public:
  using Error::Error;
};

class TableDirectiveError : public Error {
 public:
  using Error::Error;
};

class StepBudgetExceeded : public Error {
 public:
  explicit StepBudgetExceeded(std::uint64_t steps)
      : Error("step budget exhausted after " + std::to_string(steps) +
              " steps"),
        steps_(steps) {}

  std::uint64_t steps() const noexcept { return steps_; }

 private:
  std::uint64_t steps_;
};

class MetricsError : public Error {
 public:
  using Error::Error;
};

}  // namespace tabkit
