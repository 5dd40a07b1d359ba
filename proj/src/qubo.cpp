#include "ttqubo/qubo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <spdlog/spdlog.h>

#include "ttqubo/errors.hpp"

namespace ttqubo::qubo {

QuboProblem::QuboProblem(DenseMatrix matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols()) throw InputError("QUBO matrix must be square");
  if (!matrix_.all_finite()) throw InputError("QUBO matrix has non-finite entries");
  const std::size_t n = matrix_.rows();
  std::size_t asymmetric = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double a = matrix_(i, j);
      const double b = matrix_(j, i);
      if (a != b) {
        ++asymmetric;
        const double m = (a + b) / 2.0;
        matrix_(i, j) = m;
        matrix_(j, i) = m;
      }
    }
  }
  if (asymmetric > 0)
    spdlog::info("QUBO matrix was not symmetric ({} pairs); replaced by (Q + Q^T) / 2",
                 asymmetric);
}

QuboProblem QuboProblem::from_upper_triplets(std::size_t size, std::span<const Triplet> entries) {
  DenseMatrix m(size, size);
  for (const Triplet& t : entries) {
    if (t.row > t.col || t.col >= size) throw InputError("upper triplet out of range");
    m(t.row, t.col) = t.value;
    m(t.col, t.row) = t.value;
  }
  return QuboProblem(std::move(m));
}

std::vector<Triplet> QuboProblem::upper_triplets() const {
  std::vector<Triplet> out;
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      if (matrix_(i, j) != 0.0) out.push_back({i, j, matrix_(i, j)});
  return out;
}

std::size_t QuboProblem::upper_nonzeros() const {
  std::size_t count = 0;
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) count += matrix_(i, j) != 0.0;
  return count;
}

double evaluate(const QuboProblem& q, std::span<const std::uint8_t> x) {
  if (x.size() != q.size()) {
    std::ostringstream os;
    os << "assignment has length " << x.size() << ", problem has " << q.size() << " variables";
    throw InputError(os.str());
  }
  std::vector<std::size_t> ones;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 1) throw InputError("assignment must be binary");
    if (x[i]) ones.push_back(i);
  }
  double total = 0.0;
  for (std::size_t i : ones) {
    const auto row = q.matrix().row(i);
    double s = 0.0;
    for (std::size_t j : ones) s += row[j];
    total += s;
  }
  return total;
}

double selected_fraction(std::span<const std::uint8_t> x) {
  if (x.empty()) throw InputError("selected_fraction of an empty assignment");
  const auto count = std::count_if(x.begin(), x.end(), [](std::uint8_t v) { return v != 0; });
  return static_cast<double>(count) / static_cast<double>(x.size());
}

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols, std::vector<Triplet> entries)
    : rows_(rows), cols_(cols) {
  std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  row_ptr_.assign(rows + 1, 0);
  col_idx_.reserve(entries.size());
  values_.reserve(entries.size());
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const Triplet& t = entries[k];
    if (t.row >= rows || t.col >= cols) {
      std::ostringstream os;
      os << "entry (" << t.row << "," << t.col << ") outside " << rows << "x" << cols;
      throw InputError(os.str());
    }
    if (k > 0 && entries[k - 1].row == t.row && entries[k - 1].col == t.col) {
      std::ostringstream os;
      os << "duplicate entry (" << t.row << "," << t.col << ")";
      throw InputError(os.str());
    }
    if (!std::isfinite(t.value)) throw InputError("sparse matrix entry is not finite");
    ++row_ptr_[t.row + 1];
    col_idx_.push_back(t.col);
    values_.push_back(t.value);
  }
  std::partial_sum(row_ptr_.begin(), row_ptr_.end(), row_ptr_.begin());
}

double SparseMatrix::at(std::size_t i, std::size_t j) const {
  if (i >= rows_ || j >= cols_) throw InputError("sparse index out of range");
  const auto cols = row_cols(i);
  const auto it = std::lower_bound(cols.begin(), cols.end(), j);
  if (it == cols.end() || *it != j) return 0.0;
  return values_[row_ptr_[i] + static_cast<std::size_t>(it - cols.begin())];
}

std::vector<Triplet> SparseMatrix::triplets() const {
  std::vector<Triplet> out;
  out.reserve(nonzeros());
  for (std::size_t i = 0; i < rows_; ++i) {
    const auto c = row_cols(i);
    const auto v = row_values(i);
    for (std::size_t k = 0; k < c.size(); ++k) out.push_back({i, c[k], v[k]});
  }
  return out;
}

DenseMatrix SparseMatrix::to_dense() const {
  DenseMatrix m(rows_, cols_);
  for (const Triplet& t : triplets()) m(t.row, t.col) = t.value;
  return m;
}

SparseBinaryMatrix::SparseBinaryMatrix(std::size_t rows, std::size_t cols,
                                       std::vector<std::pair<std::size_t, std::size_t>> ones)
    : rows_(rows), cols_(cols) {
  std::sort(ones.begin(), ones.end());
  row_ptr_.assign(rows + 1, 0);
  col_idx_.reserve(ones.size());
  for (std::size_t k = 0; k < ones.size(); ++k) {
    const auto [i, j] = ones[k];
    if (i >= rows || j >= cols) {
      std::ostringstream os;
      os << "entry (" << i << "," << j << ") outside " << rows << "x" << cols;
      throw InputError(os.str());
    }
    if (k > 0 && ones[k - 1] == ones[k]) {
      std::ostringstream os;
      os << "duplicate entry (" << i << "," << j << ")";
      throw InputError(os.str());
    }
    ++row_ptr_[i + 1];
    col_idx_.push_back(j);
  }
  std::partial_sum(row_ptr_.begin(), row_ptr_.end(), row_ptr_.begin());
}

DenseMatrix SparseBinaryMatrix::to_dense() const {
  DenseMatrix m(rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j : row_cols(i)) m(i, j) = 1.0;
  return m;
}

void ConstraintSpec::validate() const {
  if (!(strength >= 0.0) || !std::isfinite(strength))
    throw InputError("constraint strength must be finite and >= 0");
  if (!(target_fraction >= 0.0 && target_fraction <= 1.0))
    throw InputError("target fraction must lie in [0, 1]");
}

IpmComponents build_ipm(const SimilarityMatrix& s_cbf, const SimilarityMatrix& s_cf,
                        double epsilon) {
  if (!(epsilon > 0.0)) throw InputError("epsilon must be > 0");
  if (s_cbf.rows() != s_cbf.cols() || s_cf.rows() != s_cf.cols() ||
      s_cbf.rows() != s_cf.rows()) {
    std::ostringstream os;
    os << "similarity matrices must both be I x I: got " << s_cbf.rows() << "x" << s_cbf.cols()
       << " and " << s_cf.rows() << "x" << s_cf.cols();
    throw InputError(os.str());
  }
  const std::size_t n = s_cbf.rows();
  std::vector<Triplet> reward;
  std::vector<Triplet> penalty;
  for (std::size_t i = 0; i < n; ++i) {
    for (double v : s_cf.row_values(i))
      if (v < 0.0) throw InputError("collaborative similarity has a negative entry");
    const auto cols = s_cbf.row_cols(i);
    const auto vals = s_cbf.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      if (vals[k] < 0.0) throw InputError("content similarity has a negative entry");
      if (vals[k] <= epsilon) continue;
      if (s_cf.at(i, cols[k]) > epsilon)
        reward.push_back({i, cols[k], -1.0});
      else
        penalty.push_back({i, cols[k], 1.0});
    }
  }
  return {SparseMatrix(n, n, std::move(reward)), SparseMatrix(n, n, std::move(penalty))};
}

namespace {

// ICM^T * P * ICM accumulated into a dense F x F matrix.
DenseMatrix conjugate(const SparseBinaryMatrix& icm, const SparseMatrix& p) {
  const std::size_t f = icm.cols();
  DenseMatrix out(f, f);
  // Sparse accumulator for one row of P * ICM.
  std::vector<double> acc(f, 0.0);
  std::vector<std::uint8_t> touched(f, 0);
  std::vector<std::size_t> pattern;
  for (std::size_t i = 0; i < p.rows(); ++i) {
    const auto features_i = icm.row_cols(i);
    if (features_i.empty()) continue;
    pattern.clear();
    const auto cols = p.row_cols(i);
    const auto vals = p.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      for (std::size_t g : icm.row_cols(cols[k])) {
        if (!touched[g]) {
          touched[g] = 1;
          pattern.push_back(g);
        }
        acc[g] += vals[k];
      }
    }
    for (std::size_t a : features_i) {
      auto row = out.row(a);
      for (std::size_t g : pattern) row[g] += acc[g];
    }
    for (std::size_t g : pattern) {
      acc[g] = 0.0;
      touched[g] = 0;
    }
  }
  return out;
}

}  // namespace

FpmComponents build_fpm(const SparseBinaryMatrix& icm, const IpmComponents& ipm) {
  const std::size_t items = icm.rows();
  for (const SparseMatrix* p : {&ipm.reward, &ipm.penalty}) {
    if (p->rows() != items || p->cols() != items) {
      std::ostringstream os;
      os << "IPM part is " << p->rows() << "x" << p->cols() << " but the ICM has " << items
         << " items";
      throw InputError(os.str());
    }
  }
  return {conjugate(icm, ipm.reward), conjugate(icm, ipm.penalty)};
}

DenseMatrix assemble_fpm(const FpmComponents& parts, double beta) {
  if (!std::isfinite(beta)) throw InputError("beta must be finite");
  const DenseMatrix& r = parts.reward_part;
  const DenseMatrix& p = parts.penalty_part;
  if (r.rows() != p.rows() || r.cols() != p.cols())
    throw InputError("FPM parts have different shapes");
  DenseMatrix out(r.rows(), r.cols());
  const auto rd = r.data();
  const auto pd = p.data();
  auto od = out.data();
  for (std::size_t k = 0; k < od.size(); ++k) od[k] = rd[k] + beta * pd[k];
  return out;
}

QuboProblem build_bqm(const DenseMatrix& fpm, const ConstraintSpec& constraint) {
  constraint.validate();
  if (fpm.rows() != fpm.cols()) throw InputError("FPM must be square");
  const std::size_t f = fpm.rows();
  const double s = constraint.strength;
  const double diag = 2.0 * s * constraint.target_fraction * static_cast<double>(f);
  DenseMatrix bqm = fpm;
  for (std::size_t i = 0; i < f; ++i) {
    auto row = bqm.row(i);
    for (std::size_t j = 0; j < f; ++j) row[j] += s;
    row[i] -= diag;
  }
  return QuboProblem(std::move(bqm));
}

double bqm_offset(std::size_t size, const ConstraintSpec& constraint) {
  const double pf = constraint.target_fraction * static_cast<double>(size);
  return -constraint.strength * pf * pf;
}

}  // namespace ttqubo::qubo
