#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ascpr {

using Index = std::int32_t;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand sizes do not agree (matrix/vector, partition/matrix, ...).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Malformed input: bad matrix construction, bad config value, bad file.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Malformed text file; carries the 1-based line number of the offence.
class ParseError : public InputError {
 public:
  ParseError(std::string const& what, std::int64_t line)
      : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::int64_t line() const noexcept { return line_; }

 private:
  std::int64_t line_;
};

/// A diagonal entry or diagonal block that cannot be inverted.
class SingularError : public Error {
 public:
  SingularError(std::string const& what, Index row)
      : Error(what + " (row " + std::to_string(row) + ")"), row_(row) {}

  Index row() const noexcept { return row_; }

 private:
  Index row_;
};

/// An iterative solve produced a non-finite residual.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace ascpr
