#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fmmkit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed text input. `line()` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Incompatible matrix or tensor shapes.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// An operation was called outside its precondition (wrong field mode, masked input, ...).
class ContractError : public Error {
 public:
  using Error::Error;
};

}  // namespace fmmkit
