#pragma once

#include <stdexcept>
#include <string>

namespace chr {

/// Failure categories reported by the library. The CLI maps these onto
/// exit codes, so new kinds must be added there as well.
enum class ErrorKind {
  Syntax,
  ArityClash,
  BuiltinInHead,
  DivisionByZero,
  NonGround,
  UnknownFunction,
  NonGroundComparison,
  GuardEvaluation,
  Runtime,
  UnorientablePair,
  IterationLimit,
  NonLinear,
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(int line, int column, const std::string& message)
      : Error(ErrorKind::Syntax, std::to_string(line) + ":" +
                                     std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace chr
