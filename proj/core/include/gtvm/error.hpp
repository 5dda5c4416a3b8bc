#pragma once

#include <stdexcept>
#include <string>

namespace gtvm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition violations on the model space (dead elements, kind mismatches).
class ModelError : public Error {
 public:
  using Error::Error;
};

/// Pattern or rule definitions that are ill-formed after parsing.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Unresolved cross-machine references.
class LinkError : public Error {
 public:
  using Error::Error;
};

struct SourcePos {
  int line = 0;
  int column = 0;

  // Positions never take part in structural equality of the IR.
  friend constexpr bool operator==(const SourcePos&, const SourcePos&) { return true; }
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, SourcePos pos)
      : Error(std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " + message), pos_(pos) {}

  SourcePos position() const { return pos_; }

 private:
  SourcePos pos_;
};

/// Failures raised while executing a transformation.
class RuntimeError : public Error {
 public:
  using Error::Error;
};

/// Raised when an iterate loop or a local search exceeds its step budget.
class BudgetExceeded : public RuntimeError {
 public:
  using RuntimeError::RuntimeError;
};

}  // namespace gtvm
