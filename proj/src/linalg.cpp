#include "ttqubo/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ttqubo/errors.hpp"

namespace ttqubo::linalg {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw InputError("ragged initializer for DenseMatrix");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

bool DenseMatrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

double DenseMatrix::max_abs() const noexcept {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

DenseMatrix DenseMatrix::select_rows(std::span<const std::size_t> indices) const {
  DenseMatrix out(indices.size(), cols_);
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] >= rows_) throw InputError("row index out of range");
    std::copy_n(row(indices[k]).begin(), cols_, out.row(k).begin());
  }
  return out;
}

DenseMatrix DenseMatrix::transposed() const {
  DenseMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
  return out;
}

namespace {

constexpr double kPivotRelTol = 1e-12;

double column_norm(const DenseMatrix& a, std::size_t j) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

// Square LU with partial pivoting, in place: (P M) = L U with unit L.
// perm[i] is the original row placed at position i.
struct SquareLu {
  DenseMatrix lu;
  std::vector<std::size_t> perm;
  bool singular = false;
};

SquareLu factor_square(const DenseMatrix& m) {
  const std::size_t n = m.rows();
  SquareLu f{m, std::vector<std::size_t>(n), false};
  std::iota(f.perm.begin(), f.perm.end(), std::size_t{0});
  DenseMatrix& w = f.lu;
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t p = j;
    for (std::size_t i = j + 1; i < n; ++i)
      if (std::abs(w(i, j)) > std::abs(w(p, j))) p = i;
    if (p != j) {
      std::swap_ranges(w.row(p).begin(), w.row(p).end(), w.row(j).begin());
      std::swap(f.perm[p], f.perm[j]);
    }
    const double pivot = w(j, j);
    if (pivot == 0.0) {
      f.singular = true;
      continue;
    }
    for (std::size_t i = j + 1; i < n; ++i) {
      const double factor = w(i, j) / pivot;
      w(i, j) = factor;
      if (factor == 0.0) continue;
      for (std::size_t k = j + 1; k < n; ++k) w(i, k) -= factor * w(j, k);
    }
  }
  return f;
}

// Solves x * M = a for x (row vector), given the factorization of M.
void solve_left(const SquareLu& f, std::span<const double> a, std::span<double> x,
                std::vector<double>& scratch) {
  const std::size_t n = f.perm.size();
  const DenseMatrix& w = f.lu;
  scratch.assign(n, 0.0);
  // U^T y = a
  for (std::size_t i = 0; i < n; ++i) {
    double s = a[i];
    for (std::size_t k = 0; k < i; ++k) s -= w(k, i) * scratch[k];
    scratch[i] = s / w(i, i);
  }
  // L^T z = y, unit diagonal
  for (std::size_t ii = n; ii-- > 0;) {
    double s = scratch[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= w(k, ii) * scratch[k];
    scratch[ii] = s;
  }
  for (std::size_t i = 0; i < n; ++i) x[f.perm[i]] = scratch[i];
}

std::vector<std::size_t> pivot_rows(const DenseMatrix& a, bool fill_deficient) {
  const std::size_t n = a.rows();
  const std::size_t r = std::min(a.rows(), a.cols());
  DenseMatrix w = a;
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});

  for (std::size_t j = 0; j < r; ++j) {
    std::size_t p = j;
    for (std::size_t i = j + 1; i < n; ++i)
      if (std::abs(w(perm[i], j)) > std::abs(w(perm[p], j))) p = i;

    const double norm = column_norm(a, j);
    const double pivot = w(perm[p], j);
    const bool deficient = std::abs(pivot) <= kPivotRelTol * norm;
    if (deficient) {
      if (!fill_deficient) throw RankDeficientError(j, pivot, norm);
      // Largest residual over the columns still to be processed.
      p = j;
      double best = -1.0;
      for (std::size_t i = j; i < n; ++i) {
        double s = 0.0;
        for (std::size_t k = j; k < a.cols(); ++k) s += w(perm[i], k) * w(perm[i], k);
        if (s > best) {
          best = s;
          p = i;
        }
      }
    }
    std::swap(perm[j], perm[p]);
    if (deficient) continue;

    const auto pivot_row = w.row(perm[j]);
    for (std::size_t i = j + 1; i < n; ++i) {
      auto target = w.row(perm[i]);
      const double factor = target[j] / pivot;
      if (factor == 0.0) continue;
      for (std::size_t k = j; k < a.cols(); ++k) target[k] -= factor * pivot_row[k];
    }
  }
  perm.resize(r);
  return perm;
}

}  // namespace

std::vector<std::size_t> lu_pivot_init(const DenseMatrix& a) {
  if (a.cols() == 0 || a.rows() < a.cols())
    throw InputError("lu_pivot_init needs an N x R matrix with N >= R >= 1");
  return pivot_rows(a, false);
}

std::vector<std::size_t> lu_pivot_rows_filled(const DenseMatrix& a) {
  if (a.cols() == 0 || a.rows() == 0) throw InputError("lu_pivot_rows_filled: empty matrix");
  return pivot_rows(a, true);
}

MaxvolResult maxvol(const DenseMatrix& a, double tau, std::size_t max_iters,
                    const SwapObserver& observer) {
  const std::size_t n = a.rows();
  const std::size_t r = a.cols();
  if (r == 0 || n < r) throw InputError("maxvol needs an N x R matrix with N >= R >= 1");
  if (!a.all_finite()) throw InputError("maxvol: matrix has non-finite entries");
  if (!(tau >= 0.0)) throw InputError("maxvol: tau must be >= 0");
  if (max_iters == 0) throw InputError("maxvol: max_iters must be >= 1");

  MaxvolResult res;
  res.row_indices = lu_pivot_init(a);

  // C = A * inv(A_hat), row by row.
  const SquareLu f = factor_square(a.select_rows(res.row_indices));
  if (f.singular) throw RankDeficientError(0, 0.0, 0.0);
  DenseMatrix c(n, r);
  std::vector<double> scratch;
  for (std::size_t i = 0; i < n; ++i) solve_left(f, a.row(i), c.row(i), scratch);

  std::vector<double> col(n);
  std::vector<double> pivot_row(r);
  while (true) {
    std::size_t bi = 0;
    std::size_t bj = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto ci = c.row(i);
      for (std::size_t j = 0; j < r; ++j) {
        const double v = std::abs(ci[j]);
        if (v > best) {
          best = v;
          bi = i;
          bj = j;
        }
      }
    }
    if (best <= 1.0 + tau) {
      res.converged = true;
      break;
    }
    if (res.iterations_used == max_iters) break;

    // Row bi replaces slot bj: C <- C - C[:, bj] (C[bi, :] - e_bj) / C[bi, bj].
    const double piv = c(bi, bj);
    for (std::size_t i = 0; i < n; ++i) col[i] = c(i, bj);
    for (std::size_t j = 0; j < r; ++j) pivot_row[j] = c(bi, j) / piv;
    pivot_row[bj] -= 1.0 / piv;
    for (std::size_t i = 0; i < n; ++i) {
      if (col[i] == 0.0) continue;
      auto ci = c.row(i);
      for (std::size_t j = 0; j < r; ++j) ci[j] -= col[i] * pivot_row[j];
    }
    res.row_indices[bj] = bi;
    ++res.iterations_used;
    if (observer) observer(res.row_indices);
  }

  for (std::size_t j = 0; j < r; ++j) {
    auto ci = c.row(res.row_indices[j]);
    std::fill(ci.begin(), ci.end(), 0.0);
    ci[j] = 1.0;
  }
  res.coefficients = std::move(c);
  return res;
}

double abs_det(const DenseMatrix& square) {
  if (square.rows() != square.cols()) {
    std::ostringstream os;
    os << "abs_det needs a square matrix, got " << square.rows() << "x" << square.cols();
    throw InputError(os.str());
  }
  const SquareLu f = factor_square(square);
  if (f.singular) return 0.0;
  double det = 1.0;
  for (std::size_t i = 0; i < square.rows(); ++i) det *= f.lu(i, i);
  return std::abs(det);
}

}  // namespace ttqubo::linalg
