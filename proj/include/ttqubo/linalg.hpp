#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

namespace ttqubo::linalg {

/// Row-major dense matrix of doubles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  bool all_finite() const noexcept;
  double max_abs() const noexcept;

  /// Rows `indices` of this matrix, in the given order.
  DenseMatrix select_rows(std::span<const std::size_t> indices) const;
  DenseMatrix transposed() const;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Outcome of a maximal-volume row search on an N x R matrix A.
struct MaxvolResult {
  /// R distinct rows of A; position j holds the row currently in slot j.
  std::vector<std::size_t> row_indices;
  /// N x R matrix C = A * inv(A[row_indices]).
  DenseMatrix coefficients;
  /// Number of row swaps performed.
  std::size_t iterations_used = 0;
  /// True when max |C| <= 1 + tau on return.
  bool converged = false;
};

/// Called after every swap with the current selection; used to check that
/// the submatrix volume never decreases.
using SwapObserver = std::function<void(std::span<const std::size_t> row_indices)>;

inline constexpr double kDefaultMaxvolTau = 0.01;
inline constexpr std::size_t kDefaultMaxvolIters = 100;

/// Pivot rows of a partially pivoted LU factorization of the N x R matrix `a`,
/// in pivot order. Throws RankDeficientError when the pivot of some column is
/// at most 1e-12 times that column's norm.
std::vector<std::size_t> lu_pivot_init(const DenseMatrix& a);

/// Like lu_pivot_init, but a column without a usable pivot gets the unused row
/// with the largest remaining residual instead of an error. Always returns
/// min(N, R) distinct rows.
std::vector<std::size_t> lu_pivot_rows_filled(const DenseMatrix& a);

/// Greedy maximal-volume row selection.
///
/// Starts from the LU pivot rows and repeatedly swaps in the row/slot pair
/// (i, j) with the largest |C[i, j]| (ties: smallest i, then j) while that
/// entry exceeds 1 + tau. Each swap multiplies |det| of the selected
/// submatrix by |C[i, j]|, so the volume is strictly increasing. The
/// coefficient matrix is updated by a rank-1 correction, O(NR) per swap.
MaxvolResult maxvol(const DenseMatrix& a, double tau = kDefaultMaxvolTau,
                    std::size_t max_iters = kDefaultMaxvolIters,
                    const SwapObserver& observer = {});

/// |det| of a square matrix via partial-pivot LU; 0 for singular input.
double abs_det(const DenseMatrix& square);

}  // namespace ttqubo::linalg
