#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace ttqubo {

/// Mode sizes N_1..N_d of an implicitly given tensor.
struct TensorShape {
  std::vector<int> mode_sizes;

  TensorShape() = default;
  explicit TensorShape(std::vector<int> sizes) : mode_sizes(std::move(sizes)) {}
  static TensorShape binary(std::size_t d) { return TensorShape(std::vector<int>(d, 2)); }

  std::size_t dims() const noexcept { return mode_sizes.size(); }
  int mode(std::size_t k) const { return mode_sizes.at(k); }
  int max_mode() const noexcept;

  /// Throws InputError unless d >= 1 and every mode size is >= 2.
  void validate() const;

  friend bool operator==(const TensorShape&, const TensorShape&) = default;
};

/// Full tensor index [n_1, ..., n_d], 0-based.
using MultiIndex = std::vector<int>;

/// True when `index` has length d and every entry is within its mode bound.
bool is_valid_index(const TensorShape& shape, std::span<const int> index);

/// Which end of the mode range a partial index set covers.
enum class Side : std::uint8_t { kPrefix, kSuffix };

/// A list of partial multi-indices over the contiguous mode span
/// [begin, end). Prefix sets index the rows of an unfolding matrix, suffix
/// sets its columns. Members are stored flat, one after another.
class PartialIndexSet {
 public:
  PartialIndexSet() = default;
  PartialIndexSet(Side side, std::size_t begin, std::size_t end);

  /// The set holding the single zero-length index at `position`; the row set
  /// of the first unfolding (prefix) or the column set of the last (suffix).
  static PartialIndexSet unit(Side side, std::size_t position);

  Side side() const noexcept { return side_; }
  std::size_t begin() const noexcept { return begin_; }
  std::size_t end() const noexcept { return end_; }
  std::size_t length() const noexcept { return end_ - begin_; }
  std::size_t size() const noexcept { return count_; }
  bool empty() const noexcept { return count_ == 0; }

  std::span<const int> operator[](std::size_t i) const {
    return {data_.data() + i * length(), length()};
  }

  /// Appends a member; throws InputError on a length mismatch.
  void push_back(std::span<const int> entry);

  /// True when no two members are equal.
  bool distinct() const;

  friend bool operator==(const PartialIndexSet&, const PartialIndexSet&) = default;

 private:
  Side side_ = Side::kPrefix;
  std::size_t begin_ = 0;
  std::size_t end_ = 0;
  std::size_t count_ = 0;
  std::vector<int> data_;
};

/// Compact form of nested index sets: member i of a level is its parent's
/// position in the neighbouring level plus one mode value.
struct IndexLink {
  std::size_t parent = 0;
  int value = 0;

  friend bool operator==(const IndexLink&, const IndexLink&) = default;
};

/// One vector of links per level. For suffix levels, level k spans modes
/// [k, d) and links into level k + 1; level d holds the single empty suffix.
/// For prefix levels, level k spans [0, k) and links into level k - 1; level 0
/// holds the single empty prefix.
using LinkedLevels = std::vector<std::vector<IndexLink>>;

/// Expands level k of linked suffix levels into an explicit set.
PartialIndexSet materialize_suffix(const LinkedLevels& levels, std::size_t k);

/// Expands level k of linked prefix levels into an explicit set.
PartialIndexSet materialize_prefix(const LinkedLevels& levels, std::size_t k);

/// Linked form of random_suffix_sets: levels 1..d are filled (level d is the
/// empty suffix), level 0 is left empty.
LinkedLevels random_suffix_links(const TensorShape& shape, std::size_t rank, std::uint64_t seed);

/// Initial column sets for the first forward sweep: element i of the result
/// is the suffix set over modes [i + 1, d), for i = 0..d-2, holding
/// min(rank, prod_{j > i} N_j) distinct members. Sets are nested: every member
/// over [i, d) ends with a member of the set over [i + 1, d). Deterministic per
/// seed.
std::vector<PartialIndexSet> random_suffix_sets(const TensorShape& shape, std::size_t rank,
                                                std::uint64_t seed);

/// Appends every value of the next mode to every prefix. Ordering is
/// prefix-major: position p * mode_size + v holds prefixes[p] followed by v.
PartialIndexSet expand_rows(const PartialIndexSet& prefixes, int mode_size);

/// Mirror of expand_rows for suffix sets: position s * mode_size + v holds v
/// followed by suffixes[s]; the new span starts one mode earlier.
PartialIndexSet expand_cols(const PartialIndexSet& suffixes, int mode_size);

/// Concatenates every row prefix with every column suffix, row-major (row
/// varies slowest). Throws InputError unless rows is a prefix set, cols a
/// suffix set, and rows.end() == cols.begin().
std::vector<MultiIndex> assemble_full_indices(const PartialIndexSet& rows,
                                              const PartialIndexSet& cols);

/// Inverse of the expand ordering: flat -> (prefix position, mode value).
/// Throws InputError when flat >= num_prefixes * mode_size.
std::pair<std::size_t, int> split_flat_row(std::size_t flat, int mode_size,
                                           std::size_t num_prefixes);

}  // namespace ttqubo
