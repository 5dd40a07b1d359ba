#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ttqubo/linalg.hpp"
#include "ttqubo/ttopt.hpp"

namespace ttqubo::qubo {

using linalg::DenseMatrix;

/// 0/1 assignment of the F binary variables.
using BinaryVector = std::vector<std::uint8_t>;

struct Triplet {
  std::size_t row = 0;
  std::size_t col = 0;
  double value = 0.0;

  friend bool operator==(const Triplet&, const Triplet&) = default;
};

/// Minimize x^T Q x over x in {0,1}^F. Q is stored dense and symmetric.
class QuboProblem {
 public:
  QuboProblem() = default;
  /// Symmetrizes as (Q + Q^T) / 2; an asymmetric input is logged once.
  /// Throws InputError for a non-square or non-finite matrix.
  explicit QuboProblem(DenseMatrix matrix);

  /// Builds from upper-triangle entries (i <= j); each sets Q[i][j] = Q[j][i].
  static QuboProblem from_upper_triplets(std::size_t size, std::span<const Triplet> entries);

  std::size_t size() const noexcept { return matrix_.rows(); }
  const DenseMatrix& matrix() const noexcept { return matrix_; }
  double operator()(std::size_t i, std::size_t j) const { return matrix_(i, j); }

  /// Nonzero entries with i <= j in row-major order.
  std::vector<Triplet> upper_triplets() const;
  std::size_t upper_nonzeros() const;
  double max_abs() const noexcept { return matrix_.max_abs(); }

 private:
  DenseMatrix matrix_;
};

/// x^T Q x. Throws InputError unless x has length F and 0/1 entries.
double evaluate(const QuboProblem& q, std::span<const std::uint8_t> x);

/// Fraction of selected variables, sum(x) / F. Throws InputError when empty.
double selected_fraction(std::span<const std::uint8_t> x);

/// Row-compressed sparse matrix.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  /// Entries may come in any order; duplicates and out-of-range coordinates
  /// throw InputError. Explicit zeros are kept.
  SparseMatrix(std::size_t rows, std::size_t cols, std::vector<Triplet> entries);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nonzeros() const noexcept { return values_.size(); }

  std::span<const std::size_t> row_cols(std::size_t i) const {
    return {col_idx_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
  }
  std::span<const double> row_values(std::size_t i) const {
    return {values_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
  }

  /// Stored value at (i, j), 0 when absent.
  double at(std::size_t i, std::size_t j) const;
  std::vector<Triplet> triplets() const;
  DenseMatrix to_dense() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_idx_;
  std::vector<double> values_;
};

/// Item x item similarity scores.
using SimilarityMatrix = SparseMatrix;

/// Item Content Matrix: binary item x feature incidence, ones listed.
class SparseBinaryMatrix {
 public:
  SparseBinaryMatrix() = default;
  /// Duplicates and out-of-range coordinates throw InputError.
  SparseBinaryMatrix(std::size_t rows, std::size_t cols,
                     std::vector<std::pair<std::size_t, std::size_t>> ones);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nonzeros() const noexcept { return col_idx_.size(); }
  std::span<const std::size_t> row_cols(std::size_t i) const {
    return {col_idx_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
  }
  DenseMatrix to_dense() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_idx_;
};

/// Item penalty matrix split into its reward ({0,-1}) and penalty ({0,1})
/// parts, combined later as reward + beta * penalty.
struct IpmComponents {
  SparseMatrix reward;
  SparseMatrix penalty;
};

/// Feature penalty matrix parts: ICM^T * reward * ICM and ICM^T * penalty * ICM.
struct FpmComponents {
  DenseMatrix reward_part;
  DenseMatrix penalty_part;
};

/// Soft cardinality constraint s * (1^T x - p F)^2.
struct ConstraintSpec {
  double strength = 0.0;
  double target_fraction = 0.0;

  /// Throws InputError unless s >= 0 and p in [0, 1].
  void validate() const;
};

/// Compares content-based and collaborative similarities entry by entry.
/// Where s_cbf > epsilon: reward -1 if s_cf > epsilon too, else penalty 1.
/// Everything else stays zero. Entries <= epsilon count as "about zero".
IpmComponents build_ipm(const SimilarityMatrix& s_cbf, const SimilarityMatrix& s_cf,
                        double epsilon);

/// Conjugates both IPM parts by the ICM with sparse products; no dense
/// I x I intermediate is formed.
FpmComponents build_fpm(const SparseBinaryMatrix& icm, const IpmComponents& ipm);

/// reward_part + beta * penalty_part.
DenseMatrix assemble_fpm(const FpmComponents& parts, double beta);

/// FPM + s * 1 1^T - 2 s p F * I. For binary x,
/// x^T BQM x = x^T FPM x + s (1^T x - p F)^2 - s p^2 F^2.
QuboProblem build_bqm(const DenseMatrix& fpm, const ConstraintSpec& constraint);

/// The constant -s p^2 F^2 dropped when folding the constraint into the BQM.
double bqm_offset(std::size_t size, const ConstraintSpec& constraint);

/// TTOpt objective over the binary tensor of shape (2,)*F.
///
/// operator() is the plain quadratic form and is safe to call concurrently.
/// evaluate_block exploits the structure of unfolding grids: for x = (p, s)
/// split into a prefix and a suffix,
///   x^T Q x = p^T Q p + s^T Q s + 2 p^T Q s.
/// Quadratic terms of partial indices are cached by content, and the
/// column sums h = Q[ones(e), :] of the side just expanded are derived from
/// their parent's in O(F). A grid point then costs one O(F) dot product.
/// Results agree with operator() up to rounding, so block_exact() is false.
/// The referenced problem must outlive the objective.
class QuboObjective final : public ttopt::Objective {
 public:
  explicit QuboObjective(const QuboProblem& problem);

  const TensorShape& shape() const override { return shape_; }
  double operator()(std::span<const int> index) const override;
  bool concurrent_safe() const override { return true; }
  bool block_exact() const override { return false; }
  void evaluate_block(const PartialIndexSet& rows, const PartialIndexSet& cols,
                      std::span<double> out, unsigned threads) const override;

  std::size_t cached_entries() const;

  /// Partial index viewed as a bit string over its mode span.
  struct Partial;

 private:
  struct CachedQuad {
    double quad = 0.0;
    std::uint64_t last_used = 0;
  };

  double cached_quad(const Partial& e) const;
  void evict() const;

  const QuboProblem& problem_;
  TensorShape shape_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<std::string, CachedQuad> quads_;
  mutable std::unordered_map<std::string, std::vector<double>> hot_;
  mutable std::uint64_t generation_ = 0;
};

/// Objective for ttopt::optimize. See QuboObjective.
QuboObjective as_objective(const QuboProblem& problem);

}  // namespace ttqubo::qubo
