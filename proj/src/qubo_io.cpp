#include "ttqubo/qubo_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

#include "ttqubo/errors.hpp"

namespace ttqubo::qubo {

namespace {

// Line reader that skips blank lines and `#` comments and remembers the
// 1-based line number of the last line returned.
class LineReader {
 public:
  LineReader(std::istream& is, std::string source) : is_(is), source_(std::move(source)) {}

  bool next(std::vector<std::string_view>& tokens) {
    while (std::getline(is_, line_)) {
      ++number_;
      tokens.clear();
      std::size_t k = 0;
      while (k < line_.size()) {
        while (k < line_.size() && std::isspace(static_cast<unsigned char>(line_[k]))) ++k;
        if (k == line_.size() || line_[k] == '#') break;
        const std::size_t start = k;
        while (k < line_.size() && !std::isspace(static_cast<unsigned char>(line_[k]))) ++k;
        tokens.emplace_back(line_.data() + start, k - start);
      }
      if (!tokens.empty()) return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(source_, number_, what); }

  std::size_t to_size(std::string_view token) const {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size())
      fail("expected a non-negative integer, got '" + std::string(token) + "'");
    return v;
  }

  double to_double(std::string_view token) const {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size())
      fail("expected a number, got '" + std::string(token) + "'");
    if (!std::isfinite(v)) fail("value is not finite");
    return v;
  }

  void expect_count(const std::vector<std::string_view>& tokens, std::size_t n) const {
    if (tokens.size() != n) {
      std::ostringstream os;
      os << "expected " << n << " fields, got " << tokens.size();
      fail(os.str());
    }
  }

  const std::string& line() const { return line_; }
  const std::string& source() const { return source_; }

 private:
  std::istream& is_;
  std::string source_;
  std::string line_;
  std::size_t number_ = 0;
};

void expect_end(LineReader& reader, std::vector<std::string_view>& tokens) {
  if (reader.next(tokens)) reader.fail("unexpected data after the declared entries");
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  return in;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw InputError("cannot format value");
  return std::string(buf, ptr);
}

void write_qubo(std::ostream& os, const QuboProblem& q) {
  const auto entries = q.upper_triplets();
  os << q.size() << " " << entries.size() << "\n";
  for (const Triplet& t : entries) os << t.row << " " << t.col << " " << format_double(t.value) << "\n";
}

QuboProblem read_qubo(std::istream& is, const std::string& source) {
  LineReader reader(is, source);
  std::vector<std::string_view> tokens;
  if (!reader.next(tokens)) reader.fail("empty file, expected header `F nnz`");
  reader.expect_count(tokens, 2);
  const std::size_t f = reader.to_size(tokens[0]);
  const std::size_t nnz = reader.to_size(tokens[1]);
  if (f == 0) reader.fail("F must be >= 1");
  if (nnz > f * (f + 1) / 2) reader.fail("nnz exceeds the upper triangle");
  DenseMatrix m(f, f);
  std::vector<std::uint8_t> seen(f * f, 0);
  for (std::size_t k = 0; k < nnz; ++k) {
    if (!reader.next(tokens)) reader.fail("file ends before all declared entries");
    reader.expect_count(tokens, 3);
    const std::size_t i = reader.to_size(tokens[0]);
    const std::size_t j = reader.to_size(tokens[1]);
    const double v = reader.to_double(tokens[2]);
    if (i >= f || j >= f) reader.fail("index out of range");
    if (i > j) reader.fail("entry below the diagonal (need i <= j)");
    if (seen[i * f + j]) reader.fail("duplicate entry");
    seen[i * f + j] = 1;
    m(i, j) = v;
    m(j, i) = v;
  }
  expect_end(reader, tokens);
  return QuboProblem(std::move(m));
}

void write_qubo_csv(std::ostream& os, const QuboProblem& q) {
  const std::size_t f = q.size();
  for (std::size_t i = 0; i < f; ++i) {
    for (std::size_t j = 0; j < f; ++j) {
      if (j > 0) os << ",";
      os << format_double(q(i, j));
    }
    os << "\n";
  }
}

QuboProblem read_qubo_csv(std::istream& is, const std::string& source) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t number = 0;
  while (std::getline(is, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      std::string_view field(line.data() + start,
                             (comma == std::string::npos ? line.size() : comma) - start);
      while (!field.empty() && std::isspace(static_cast<unsigned char>(field.front())))
        field.remove_prefix(1);
      while (!field.empty() && std::isspace(static_cast<unsigned char>(field.back())))
        field.remove_suffix(1);
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (field.empty() || ec != std::errc() || ptr != field.data() + field.size())
        throw ParseError(source, number, "expected a number, got '" + std::string(field) + "'");
      if (!std::isfinite(v)) throw ParseError(source, number, "value is not finite");
      row.push_back(v);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw ParseError(source, number, "row length differs from the first row");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(source, 0, "empty CSV");
  if (rows.size() != rows.front().size())
    throw ParseError(source, 0, "CSV matrix is not square");
  const std::size_t f = rows.size();
  DenseMatrix m(f, f);
  for (std::size_t i = 0; i < f; ++i)
    for (std::size_t j = 0; j < f; ++j) m(i, j) = rows[i][j];
  return QuboProblem(std::move(m));
}

void write_icm(std::ostream& os, const SparseBinaryMatrix& icm) {
  os << icm.rows() << " " << icm.cols() << " " << icm.nonzeros() << "\n";
  for (std::size_t i = 0; i < icm.rows(); ++i)
    for (std::size_t j : icm.row_cols(i)) os << i << " " << j << "\n";
}

SparseBinaryMatrix read_icm(std::istream& is, const std::string& source) {
  LineReader reader(is, source);
  std::vector<std::string_view> tokens;
  if (!reader.next(tokens)) reader.fail("empty file, expected header `I F nnz`");
  reader.expect_count(tokens, 3);
  const std::size_t items = reader.to_size(tokens[0]);
  const std::size_t features = reader.to_size(tokens[1]);
  const std::size_t nnz = reader.to_size(tokens[2]);
  std::vector<std::pair<std::size_t, std::size_t>> ones;
  ones.reserve(nnz);
  for (std::size_t k = 0; k < nnz; ++k) {
    if (!reader.next(tokens)) reader.fail("file ends before all declared entries");
    reader.expect_count(tokens, 2);
    const std::size_t i = reader.to_size(tokens[0]);
    const std::size_t j = reader.to_size(tokens[1]);
    if (i >= items || j >= features) reader.fail("index out of range");
    ones.emplace_back(i, j);
  }
  expect_end(reader, tokens);
  try {
    return SparseBinaryMatrix(items, features, std::move(ones));
  } catch (const InputError& e) {
    throw ParseError(source, 0, e.what());
  }
}

void write_similarity(std::ostream& os, const SimilarityMatrix& s) {
  os << s.rows() << " " << s.nonzeros() << "\n";
  for (const Triplet& t : s.triplets()) os << t.row << " " << t.col << " " << format_double(t.value) << "\n";
}

SimilarityMatrix read_similarity(std::istream& is, const std::string& source) {
  LineReader reader(is, source);
  std::vector<std::string_view> tokens;
  if (!reader.next(tokens)) reader.fail("empty file, expected header `I nnz`");
  reader.expect_count(tokens, 2);
  const std::size_t n = reader.to_size(tokens[0]);
  const std::size_t nnz = reader.to_size(tokens[1]);
  std::vector<Triplet> entries;
  entries.reserve(nnz);
  for (std::size_t k = 0; k < nnz; ++k) {
    if (!reader.next(tokens)) reader.fail("file ends before all declared entries");
    reader.expect_count(tokens, 3);
    const std::size_t i = reader.to_size(tokens[0]);
    const std::size_t j = reader.to_size(tokens[1]);
    const double v = reader.to_double(tokens[2]);
    if (i >= n || j >= n) reader.fail("index out of range");
    entries.push_back({i, j, v});
  }
  expect_end(reader, tokens);
  try {
    return SimilarityMatrix(n, n, std::move(entries));
  } catch (const InputError& e) {
    throw ParseError(source, 0, e.what());
  }
}

QuboProblem load_qubo(const std::string& path) {
  std::ifstream in = open_input(path);
  std::string first;
  while (std::getline(in, first) && first.find_first_not_of(" \t\r") == std::string::npos) {
  }
  const bool csv = first.find(',') != std::string::npos;
  in.clear();
  in.seekg(0);
  return csv ? read_qubo_csv(in, path) : read_qubo(in, path);
}

void save_qubo(const std::string& path, const QuboProblem& q) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  write_qubo(out, q);
  if (!out) throw Error("write failed: " + path);
}

SparseBinaryMatrix load_icm(const std::string& path) {
  std::ifstream in = open_input(path);
  return read_icm(in, path);
}

SimilarityMatrix load_similarity(const std::string& path) {
  std::ifstream in = open_input(path);
  return read_similarity(in, path);
}

}  // namespace ttqubo::qubo
