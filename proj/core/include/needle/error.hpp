#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace needle {

enum class ErrorKind {
  Syntax,      // malformed source text
  Validation,  // well-formed but rejected: typing, linearity, tree construction
  Evaluation,  // runtime failure such as integer overflow
  Internal,    // broken invariant (e.g. no object rule matches a redex)
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t line, std::size_t column, const std::string& msg)
      : Error(ErrorKind::Syntax,
              std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& msg) : Error(ErrorKind::Validation, msg) {}
};

class EvaluationError : public Error {
 public:
  explicit EvaluationError(const std::string& msg) : Error(ErrorKind::Evaluation, msg) {}
};

class InternalError : public Error {
 public:
  explicit InternalError(const std::string& msg) : Error(ErrorKind::Internal, msg) {}
};

}  // namespace needle
