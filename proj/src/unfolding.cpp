#include "ttqubo/unfolding.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "ttqubo/errors.hpp"

namespace ttqubo {

int TensorShape::max_mode() const noexcept {
  int m = 0;
  for (int n : mode_sizes) m = std::max(m, n);
  return m;
}

void TensorShape::validate() const {
  if (mode_sizes.empty()) throw InputError("tensor shape must have at least one mode");
  for (std::size_t k = 0; k < mode_sizes.size(); ++k) {
    if (mode_sizes[k] < 2) {
      std::ostringstream os;
      os << "mode " << k << " has size " << mode_sizes[k] << ", expected >= 2";
      throw InputError(os.str());
    }
  }
}

bool is_valid_index(const TensorShape& shape, std::span<const int> index) {
  if (index.size() != shape.dims()) return false;
  for (std::size_t k = 0; k < index.size(); ++k)
    if (index[k] < 0 || index[k] >= shape.mode_sizes[k]) return false;
  return true;
}

PartialIndexSet::PartialIndexSet(Side side, std::size_t begin, std::size_t end)
    : side_(side), begin_(begin), end_(end) {
  if (end < begin) throw InputError("partial index span has end < begin");
}

PartialIndexSet PartialIndexSet::unit(Side side, std::size_t position) {
  PartialIndexSet s(side, position, position);
  s.count_ = 1;
  return s;
}

void PartialIndexSet::push_back(std::span<const int> entry) {
  if (entry.size() != length()) throw InputError("partial index has the wrong length");
  data_.insert(data_.end(), entry.begin(), entry.end());
  ++count_;
}

bool PartialIndexSet::distinct() const {
  std::set<std::vector<int>> seen;
  for (std::size_t i = 0; i < count_; ++i) {
    const auto e = (*this)[i];
    if (!seen.emplace(e.begin(), e.end()).second) return false;
  }
  return true;
}

LinkedLevels random_suffix_links(const TensorShape& shape, std::size_t rank,
                                 std::uint64_t seed) {
  shape.validate();
  if (rank == 0) throw InputError("rank must be >= 1");
  const std::size_t d = shape.dims();
  LinkedLevels levels(d + 1);
  levels[d] = {IndexLink{}};

  std::mt19937_64 rng(seed);
  for (std::size_t k = d - 1; k >= 1; --k) {
    // Candidates are all one-mode extensions of the next level; a uniform
    // sample of those is marginally uniform over the whole suffix space.
    const auto n = static_cast<std::size_t>(shape.mode_sizes[k]);
    const std::size_t num_candidates = levels[k + 1].size() * n;
    const std::size_t take = std::min(rank, num_candidates);
    std::vector<std::size_t> order(num_candidates);
    for (std::size_t c = 0; c < num_candidates; ++c) order[c] = c;
    for (std::size_t c = 0; c < take; ++c) {
      std::uniform_int_distribution<std::size_t> pick(c, num_candidates - 1);
      std::swap(order[c], order[pick(rng)]);
    }
    auto& level = levels[k];
    level.reserve(take);
    for (std::size_t c = 0; c < take; ++c)
      level.push_back({order[c] / n, static_cast<int>(order[c] % n)});
  }
  return levels;
}

std::vector<PartialIndexSet> random_suffix_sets(const TensorShape& shape, std::size_t rank,
                                                std::uint64_t seed) {
  const LinkedLevels levels = random_suffix_links(shape, rank, seed);
  const std::size_t d = shape.dims();
  std::vector<PartialIndexSet> sets;
  sets.reserve(d - 1);
  for (std::size_t k = 1; k < d; ++k) sets.push_back(materialize_suffix(levels, k));
  return sets;
}

PartialIndexSet materialize_suffix(const LinkedLevels& levels, std::size_t k) {
  const std::size_t d = levels.size() - 1;
  if (k > d) throw InputError("suffix level out of range");
  PartialIndexSet out(Side::kSuffix, k, d);
  if (k == d) return PartialIndexSet::unit(Side::kSuffix, d);
  std::vector<int> entry(d - k);
  for (const IndexLink& head : levels[k]) {
    const IndexLink* link = &head;
    for (std::size_t m = k; m < d; ++m) {
      entry[m - k] = link->value;
      if (m + 1 < d) {
        const auto& next = levels[m + 1];
        if (link->parent >= next.size()) throw InputError("dangling suffix link");
        link = &next[link->parent];
      }
    }
    out.push_back(entry);
  }
  return out;
}

PartialIndexSet materialize_prefix(const LinkedLevels& levels, std::size_t k) {
  if (k >= levels.size()) throw InputError("prefix level out of range");
  if (k == 0) return PartialIndexSet::unit(Side::kPrefix, 0);
  PartialIndexSet out(Side::kPrefix, 0, k);
  std::vector<int> entry(k);
  for (const IndexLink& tail : levels[k]) {
    const IndexLink* link = &tail;
    for (std::size_t m = k; m-- > 0;) {
      entry[m] = link->value;
      if (m > 0) {
        const auto& prev = levels[m];
        if (link->parent >= prev.size()) throw InputError("dangling prefix link");
        link = &prev[link->parent];
      }
    }
    out.push_back(entry);
  }
  return out;
}

PartialIndexSet expand_rows(const PartialIndexSet& prefixes, int mode_size) {
  if (prefixes.side() != Side::kPrefix) throw InputError("expand_rows needs a prefix set");
  if (mode_size < 1) throw InputError("mode size must be positive");
  PartialIndexSet out(Side::kPrefix, prefixes.begin(), prefixes.end() + 1);
  std::vector<int> entry(out.length());
  for (std::size_t p = 0; p < prefixes.size(); ++p) {
    const auto src = prefixes[p];
    std::copy(src.begin(), src.end(), entry.begin());
    for (int v = 0; v < mode_size; ++v) {
      entry.back() = v;
      out.push_back(entry);
    }
  }
  return out;
}

PartialIndexSet expand_cols(const PartialIndexSet& suffixes, int mode_size) {
  if (suffixes.side() != Side::kSuffix) throw InputError("expand_cols needs a suffix set");
  if (mode_size < 1) throw InputError("mode size must be positive");
  if (suffixes.begin() == 0) throw InputError("suffix set already starts at mode 0");
  PartialIndexSet out(Side::kSuffix, suffixes.begin() - 1, suffixes.end());
  std::vector<int> entry(out.length());
  for (std::size_t s = 0; s < suffixes.size(); ++s) {
    const auto src = suffixes[s];
    std::copy(src.begin(), src.end(), entry.begin() + 1);
    for (int v = 0; v < mode_size; ++v) {
      entry.front() = v;
      out.push_back(entry);
    }
  }
  return out;
}

std::vector<MultiIndex> assemble_full_indices(const PartialIndexSet& rows,
                                              const PartialIndexSet& cols) {
  if (rows.side() != Side::kPrefix || cols.side() != Side::kSuffix)
    throw InputError("assemble_full_indices needs a prefix row set and a suffix column set");
  if (rows.end() != cols.begin()) {
    std::ostringstream os;
    os << "row span ends at mode " << rows.end() << " but column span starts at mode "
       << cols.begin();
    throw InputError(os.str());
  }
  std::vector<MultiIndex> out;
  out.reserve(rows.size() * cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      MultiIndex idx;
      idx.reserve(rows.length() + cols.length());
      const auto r = rows[i];
      const auto c = cols[j];
      idx.insert(idx.end(), r.begin(), r.end());
      idx.insert(idx.end(), c.begin(), c.end());
      out.push_back(std::move(idx));
    }
  }
  return out;
}

std::pair<std::size_t, int> split_flat_row(std::size_t flat, int mode_size,
                                           std::size_t num_prefixes) {
  if (mode_size < 1) throw InputError("mode size must be positive");
  const auto n = static_cast<std::size_t>(mode_size);
  if (flat >= num_prefixes * n) {
    std::ostringstream os;
    os << "flat row " << flat << " out of range for " << num_prefixes << " prefixes x "
       << mode_size << " values";
    throw InputError(os.str());
  }
  return {flat / n, static_cast<int>(flat % n)};
}

}  // namespace ttqubo
