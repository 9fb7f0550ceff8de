#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nullcore {

enum class ErrorCode {
  SyntaxError,
  UnsafeFrontier,
  UnsafeNegation,
  ArityMismatch,
  NullInRule,
  ExistentialInBody,
  VariableInFact,
  TrivialQuery,
  NoHomomorphism,
  PreconditionViolated,
  StepLimitExceeded,
  UnsafeQueryInChaseMode,
  InvalidTransformation,
  NoStratification,
};

std::string_view to_string(ErrorCode code);

/// Base for every error raised by the library. The code is stable and is
/// what the CLI maps onto exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t line, std::size_t column, const std::string& message)
      : Error(ErrorCode::SyntaxError, std::to_string(line) + ":" + std::to_string(column) +
                                          ": syntax error: " + message),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace nullcore
