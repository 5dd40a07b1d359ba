#pragma once

#include <iosfwd>
#include <string>

#include "ttqubo/qubo.hpp"

namespace ttqubo::qubo {

/// Sparse QUBO text: `F nnz`, then nnz lines `i j value` with 0-based i <= j.
/// Values are written in shortest round-trip form, so read(write(q)) == q.
void write_qubo(std::ostream& os, const QuboProblem& q);
QuboProblem read_qubo(std::istream& is, const std::string& source = "<stream>");

/// Dense CSV: F rows of F comma-separated values. Symmetrized on read.
void write_qubo_csv(std::ostream& os, const QuboProblem& q);
QuboProblem read_qubo_csv(std::istream& is, const std::string& source = "<stream>");

/// ICM text: `I F nnz`, then nnz lines `i j` (item, feature).
void write_icm(std::ostream& os, const SparseBinaryMatrix& icm);
SparseBinaryMatrix read_icm(std::istream& is, const std::string& source = "<stream>");

/// Similarity text: `I nnz`, then nnz lines `i j value`. Any (i, j) order is
/// allowed since similarities need not be symmetric.
void write_similarity(std::ostream& os, const SimilarityMatrix& s);
SimilarityMatrix read_similarity(std::istream& is, const std::string& source = "<stream>");

/// Opens `path` and dispatches on content: a first line with commas is CSV,
/// otherwise the sparse format. Throws ParseError when unreadable.
QuboProblem load_qubo(const std::string& path);
void save_qubo(const std::string& path, const QuboProblem& q);
SparseBinaryMatrix load_icm(const std::string& path);
SimilarityMatrix load_similarity(const std::string& path);

/// Shortest decimal that parses back to exactly `value`.
std::string format_double(double value);

}  // namespace ttqubo::qubo
