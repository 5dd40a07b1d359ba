#include <algorithm>
#include <sstream>

#include "ttqubo/errors.hpp"
#include "ttqubo/qubo.hpp"

namespace ttqubo::qubo {

struct QuboObjective::Partial {
  Side side;
  std::size_t begin;
  std::size_t end;
  std::span<const int> bits;

  std::size_t length() const { return bits.size(); }

  // Drops the mode next to the split point.
  Partial parent() const {
    if (side == Side::kPrefix) return {side, begin, end - 1, bits.first(bits.size() - 1)};
    return {side, begin + 1, end, bits.subspan(1)};
  }
  std::size_t inner_mode() const { return side == Side::kPrefix ? end - 1 : begin; }
  int inner_bit() const { return side == Side::kPrefix ? bits.back() : bits.front(); }

  // The sub-index of length l that keeps the outer end (mode 0 or mode d-1).
  Partial ancestor(std::size_t l) const {
    if (side == Side::kPrefix) return {side, begin, begin + l, bits.first(l)};
    return {side, end - l, end, bits.last(l)};
  }
};

namespace {

using Partial = QuboObjective::Partial;

std::string make_key(const Partial& e) {
  std::string key;
  key.reserve(9 + e.length() / 8 + 1);
  key.push_back(e.side == Side::kPrefix ? 'p' : 's');
  const auto put32 = [&key](std::size_t v) {
    for (int b = 0; b < 4; ++b) key.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
  };
  put32(e.begin);
  put32(e.end);
  unsigned char acc = 0;
  int nbits = 0;
  for (int v : e.bits) {
    acc = static_cast<unsigned char>(acc | (v << nbits));
    if (++nbits == 8) {
      key.push_back(static_cast<char>(acc));
      acc = 0;
      nbits = 0;
    }
  }
  if (nbits > 0) key.push_back(static_cast<char>(acc));
  return key;
}

// Sum of h over a list of positions, four independent accumulators.
double gather_sum(const double* h, const std::vector<std::size_t>& pos) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  const std::size_t n = pos.size();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    s0 += h[pos[k]];
    s1 += h[pos[k + 1]];
    s2 += h[pos[k + 2]];
    s3 += h[pos[k + 3]];
  }
  for (; k < n; ++k) s0 += h[pos[k]];
  return (s0 + s1) + (s2 + s3);
}

std::vector<std::size_t> ones_of(const Partial& e) {
  std::vector<std::size_t> ones;
  for (std::size_t k = 0; k < e.length(); ++k)
    if (e.bits[k]) ones.push_back(e.begin + k);
  return ones;
}

void check_binary(std::span<const int> bits) {
  for (int v : bits)
    if (v != 0 && v != 1) throw InputError("QUBO objective needs a binary index");
}

}  // namespace

QuboObjective::QuboObjective(const QuboProblem& problem)
    : problem_(problem), shape_(TensorShape::binary(problem.size())) {
  if (problem.size() == 0) throw InputError("QUBO problem has no variables");
}

QuboObjective as_objective(const QuboProblem& problem) { return QuboObjective(problem); }

double QuboObjective::operator()(std::span<const int> index) const {
  if (index.size() != problem_.size()) throw InputError("index length differs from QUBO size");
  check_binary(index);
  BinaryVector x(index.begin(), index.end());
  return evaluate(problem_, x);
}

std::size_t QuboObjective::cached_entries() const {
  std::lock_guard lock(mutex_);
  return quads_.size();
}

double QuboObjective::cached_quad(const Partial& e) const {
  if (e.length() == 0) return 0.0;
  const std::string key = make_key(e);
  if (auto it = quads_.find(key); it != quads_.end()) {
    it->second.last_used = generation_;
    return it->second.quad;
  }

  // Longest cached ancestor, then extend one mode at a time towards e.
  std::size_t start = 0;
  double quad = 0.0;
  for (std::size_t l = e.length() - 1; l >= 1; --l) {
    if (auto it = quads_.find(make_key(e.ancestor(l))); it != quads_.end()) {
      it->second.last_used = generation_;
      start = l;
      quad = it->second.quad;
      break;
    }
  }
  const Partial from = e.ancestor(start);
  std::vector<std::size_t> ones = ones_of(from);
  const DenseMatrix& q = problem_.matrix();
  for (std::size_t l = start + 1; l <= e.length(); ++l) {
    const Partial a = e.ancestor(l);
    const std::size_t m = a.inner_mode();
    if (a.inner_bit()) {
      quad += q(m, m) + 2.0 * gather_sum(q.row(m).data(), ones);
      ones.push_back(m);
    }
    quads_[make_key(a)] = {quad, generation_};
  }
  return quad;
}

void QuboObjective::evict() const {
  const std::uint64_t window = 2 * shape_.dims() + 16;
  if (generation_ <= window) return;
  std::erase_if(quads_, [&](const auto& kv) { return kv.second.last_used + window < generation_; });
}

void QuboObjective::evaluate_block(const PartialIndexSet& rows, const PartialIndexSet& cols,
                                   std::span<double> out, unsigned /*threads*/) const {
  const std::size_t d = shape_.dims();
  if (rows.side() != Side::kPrefix || cols.side() != Side::kSuffix || rows.begin() != 0 ||
      rows.end() != cols.begin() || cols.end() != d)
    throw InputError("QUBO grid needs prefixes over [0, k) and suffixes over [k, F)");
  const std::size_t nr = rows.size();
  const std::size_t nc = cols.size();
  if (out.size() > nr * nc) throw InputError("evaluate_block: output larger than grid");
  for (std::size_t i = 0; i < nr; ++i) check_binary(rows[i]);
  for (std::size_t j = 0; j < nc; ++j) check_binary(cols[j]);

  std::lock_guard lock(mutex_);
  ++generation_;
  const DenseMatrix& q = problem_.matrix();

  const auto partial = [](const PartialIndexSet& set, std::size_t i) {
    return Partial{set.side(), set.begin(), set.end(), set[i]};
  };
  const auto parents_hot = [&](const PartialIndexSet& set) {
    for (std::size_t i = 0; i < set.size(); ++i) {
      const Partial e = partial(set, i);
      if (e.length() > 1 && !hot_.contains(make_key(e.parent()))) return false;
    }
    return true;
  };
  const auto ones_total = [&](const PartialIndexSet& set) {
    std::size_t t = 0;
    for (std::size_t i = 0; i < set.size(); ++i)
      t += static_cast<std::size_t>(std::count(set[i].begin(), set[i].end(), 1));
    return t;
  };

  const bool rows_hot = parents_hot(rows);
  const bool cols_hot = parents_hot(cols);
  bool hot_is_rows;
  if (rows_hot && cols_hot)
    hot_is_rows = nr >= nc;
  else if (rows_hot || cols_hot)
    hot_is_rows = rows_hot;
  else
    hot_is_rows = ones_total(rows) <= ones_total(cols);
  const PartialIndexSet& hot_set = hot_is_rows ? rows : cols;
  const PartialIndexSet& other_set = hot_is_rows ? cols : rows;

  // Column sums h_e[j] = sum_{i in ones(e)} Q[i][j] and quad terms of the
  // hot side; the last trailing slot of each h holds the quad term.
  std::unordered_map<std::string, std::vector<double>> next_hot;
  std::vector<const std::vector<double>*> h(hot_set.size());
  std::vector<double> hot_quad(hot_set.size());
  for (std::size_t i = 0; i < hot_set.size(); ++i) {
    const Partial e = partial(hot_set, i);
    std::string key = make_key(e);
    if (auto it = next_hot.find(key); it != next_hot.end()) {
      h[i] = &it->second;
      hot_quad[i] = it->second[d];
      continue;
    }
    std::vector<double> he(d + 1, 0.0);
    double quad = 0.0;
    if (e.length() > 0) {
      const auto parent_it = e.length() > 1 ? hot_.find(make_key(e.parent())) : hot_.end();
      if (e.length() == 1 || parent_it != hot_.end()) {
        if (parent_it != hot_.end()) he = parent_it->second;
        const double parent_quad = e.length() == 1 ? 0.0 : he[d];
        quad = parent_quad;
        const std::size_t m = e.inner_mode();
        if (e.inner_bit()) {
          quad += 2.0 * he[m] + q(m, m);
          const auto row = q.row(m);
          for (std::size_t j = 0; j < d; ++j) he[j] += row[j];
        }
      } else {
        for (std::size_t m : ones_of(e)) {
          const auto row = q.row(m);
          for (std::size_t j = 0; j < d; ++j) he[j] += row[j];
        }
        for (std::size_t m : ones_of(e)) quad += he[m];
      }
    }
    he[d] = quad;
    hot_quad[i] = quad;
    if (e.length() > 0) quads_[key] = {quad, generation_};
    auto [it, inserted] = next_hot.emplace(std::move(key), std::move(he));
    h[i] = &it->second;
  }

  std::vector<double> other_quad(other_set.size());
  std::vector<std::vector<std::size_t>> other_ones(other_set.size());
  for (std::size_t j = 0; j < other_set.size(); ++j) {
    const Partial e = partial(other_set, j);
    other_quad[j] = cached_quad(e);
    other_ones[j] = ones_of(e);
  }

  for (std::size_t p = 0; p < out.size(); ++p) {
    const std::size_t i = p / nc;
    const std::size_t j = p % nc;
    const std::size_t hi = hot_is_rows ? i : j;
    const std::size_t oi = hot_is_rows ? j : i;
    const double cross = gather_sum(h[hi]->data(), other_ones[oi]);
    out[p] = hot_quad[hi] + other_quad[oi] + 2.0 * cross;
  }

  hot_ = std::move(next_hot);
  if (generation_ % (d + 1) == 0) evict();
}

}  // namespace ttqubo::qubo
