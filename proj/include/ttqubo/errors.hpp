#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ttqubo {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument: wrong shape, out-of-range index, non-finite data.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A column of a tall matrix has no usable pivot.
class RankDeficientError : public Error {
 public:
  RankDeficientError(std::size_t column, double pivot, double column_norm);

  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t column_;
};

/// Integer result does not fit in the target type.
class OverflowError : public Error {
 public:
  using Error::Error;
};

/// A request exceeds a hard size guard (e.g. exhaustive search on a large F).
class LimitError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. `line()` is 1-based; 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what);

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace ttqubo
