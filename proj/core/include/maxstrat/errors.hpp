#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace maxstrat {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Division by zero, or +inf + -inf on extended rationals.
class ArithmeticError : public Error {
 public:
  using Error::Error;
};

/// Operands of a BDD operation live in different managers.
class ManagerMismatchError : public Error {
 public:
  ManagerMismatchError() : Error("bdd operands belong to different managers") {}
};

/// A node/resource cap was hit (BDD node cap, SMT search cap).
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// Syntax or sort error in a model file.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " +
              message),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Misuse of an API contract (bad arguments, empty stacks, bad sorts).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Internal-consistency failure inside the strategy-iteration engine.
class EngineError : public Error {
 public:
  using Error::Error;
};

/// The engine exceeded its configured number of rounds.
class IterationCapError : public Error {
 public:
  using Error::Error;
};

}  // namespace maxstrat
