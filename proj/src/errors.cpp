#include "ttqubo/errors.hpp"

#include <sstream>

namespace ttqubo {

namespace {

std::string rank_message(std::size_t column, double pivot, double column_norm) {
  std::ostringstream os;
  os << "rank-deficient matrix: column " << column << " has pivot " << pivot
     << " against column norm " << column_norm;
  return os.str();
}

std::string parse_message(const std::string& source, std::size_t line, const std::string& what) {
  std::ostringstream os;
  os << source;
  if (line > 0) os << ":" << line;
  os << ": " << what;
  return os.str();
}

}  // namespace

RankDeficientError::RankDeficientError(std::size_t column, double pivot, double column_norm)
    : Error(rank_message(column, pivot, column_norm)), column_(column) {}

ParseError::ParseError(const std::string& source, std::size_t line, const std::string& what)
    : Error(parse_message(source, line, what)), line_(line) {}

}  // namespace ttqubo
