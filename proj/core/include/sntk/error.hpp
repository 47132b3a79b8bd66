#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sntk {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input text or files: expressions, model files, coefficient lists.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure could not produce a result satisfying its contract.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class ParseError : public InputError {
 public:
  ParseError(const std::string& what, std::size_t position)
      : InputError(what + " at position " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

class UndeclaredIdentifierError : public ParseError {
 public:
  UndeclaredIdentifierError(const std::string& name, std::size_t position)
      : ParseError("undeclared identifier '" + name + "'", position), name_(name) {}

  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

/// Model file validation failure; line is 1-based, 0 when not tied to a line.
class ModelError : public InputError {
 public:
  ModelError(const std::string& what, std::size_t line)
      : InputError(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Division by, or logarithm/root of, a jet whose constant term is inadmissible.
class SingularJetError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ConvergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// f_mu or f_xx vanish (within tolerance) at a saddle-node candidate.
class GenericityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Target state cannot be reached along the flow.
class UnreachableError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Linearisations at corresponding equilibria differ, so no C^1 conjugacy exists.
class MultiplierMismatchError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace sntk
