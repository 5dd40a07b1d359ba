#include <random>
#include <set>

#include "catch_amalgamated.hpp"
#include "catch_printers.hpp"
#include "ttqubo/errors.hpp"
#include "ttqubo/unfolding.hpp"

using namespace ttqubo;

namespace {

PartialIndexSet make_set(Side side, std::size_t begin, std::size_t end,
                         std::vector<std::vector<int>> members) {
  PartialIndexSet s(side, begin, end);
  for (const auto& m : members) s.push_back(m);
  return s;
}

std::vector<std::vector<int>> members_of(const PartialIndexSet& s) {
  std::vector<std::vector<int>> out;
  for (std::size_t i = 0; i < s.size(); ++i) out.emplace_back(s[i].begin(), s[i].end());
  return out;
}

}  // namespace

TEST_CASE("TensorShape validation and index checks") {
  CHECK_THROWS_AS(TensorShape().validate(), InputError);
  CHECK_THROWS_AS(TensorShape({2, 1}).validate(), InputError);
  const TensorShape s({2, 3, 4});
  CHECK_NOTHROW(s.validate());
  CHECK(s.dims() == 3);
  CHECK(s.max_mode() == 4);
  CHECK(is_valid_index(s, std::vector<int>{1, 2, 3}));
  CHECK_FALSE(is_valid_index(s, std::vector<int>{1, 3, 0}));
  CHECK_FALSE(is_valid_index(s, std::vector<int>{1, 2}));
  CHECK(TensorShape::binary(3) == TensorShape({2, 2, 2}));
}

TEST_CASE("random_suffix_sets clamps at the tail") {
  const auto sets = random_suffix_sets(TensorShape::binary(2), 4, 0);
  REQUIRE(sets.size() == 1);
  CHECK(sets[0].size() == 2);
  CHECK(sets[0].begin() == 1);
  CHECK(sets[0].end() == 2);
  CHECK(sets[0].distinct());
}

TEST_CASE("random_suffix_sets is deterministic per seed") {
  const auto a = random_suffix_sets(TensorShape::binary(5), 2, 7);
  const auto b = random_suffix_sets(TensorShape::binary(5), 2, 7);
  CHECK(a == b);
  bool differs = false;
  for (std::uint64_t seed = 8; seed < 20 && !differs; ++seed)
    differs = random_suffix_sets(TensorShape::binary(5), 2, seed) != a;
  CHECK(differs);
}

TEST_CASE("random_suffix_sets over a binary tensor of order 10") {
  const std::size_t d = 10;
  const auto sets = random_suffix_sets(TensorShape::binary(d), 4, 3);
  REQUIRE(sets.size() == d - 1);
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const auto& s = sets[i];
    CHECK(s.side() == Side::kSuffix);
    CHECK(s.begin() == i + 1);
    CHECK(s.end() == d);
    const std::size_t space = std::size_t{1} << (d - i - 1);
    CHECK(s.size() == std::min<std::size_t>(4, space));
    CHECK(s.distinct());
    for (std::size_t m = 0; m < s.size(); ++m)
      for (int v : s[m]) CHECK((v == 0 || v == 1));
  }
  // Nested: each member over [i, d) ends with a member over [i + 1, d).
  for (std::size_t i = 0; i + 1 < sets.size(); ++i) {
    const auto tail = members_of(sets[i + 1]);
    for (std::size_t m = 0; m < sets[i].size(); ++m) {
      std::vector<int> rest(sets[i][m].begin() + 1, sets[i][m].end());
      CHECK(std::find(tail.begin(), tail.end(), rest) != tail.end());
    }
  }
}

TEST_CASE("random suffix members are spread over the suffix space") {
  // Over many seeds the first member over [1, 4) of a binary order-4 tensor
  // should hit all 8 suffixes.
  std::set<std::vector<int>> seen;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto sets = random_suffix_sets(TensorShape::binary(4), 2, seed);
    seen.insert(std::vector<int>(sets[0][0].begin(), sets[0][0].end()));
  }
  CHECK(seen.size() == 8);
}

TEST_CASE("random_suffix_sets with non-binary modes") {
  const auto sets = random_suffix_sets(TensorShape({3, 3, 5}), 4, 1);
  REQUIRE(sets.size() == 2);
  CHECK(sets[1].size() == 4);
  CHECK(sets[0].size() == 4);
  for (std::size_t m = 0; m < sets[1].size(); ++m) CHECK(sets[1][m][0] < 5);
  CHECK_THROWS_AS(random_suffix_sets(TensorShape::binary(3), 0, 1), InputError);
}

TEST_CASE("expand_rows") {
  SECTION("first unfolding") {
    const auto e = expand_rows(PartialIndexSet::unit(Side::kPrefix, 0), 2);
    CHECK(members_of(e) == std::vector<std::vector<int>>{{0}, {1}});
    CHECK(e.begin() == 0);
    CHECK(e.end() == 1);
  }
  SECTION("full expansion of two prefixes") {
    const auto e = expand_rows(make_set(Side::kPrefix, 0, 1, {{0}, {1}}), 2);
    CHECK(members_of(e) == std::vector<std::vector<int>>{{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  }
  SECTION("four prefixes of length 3") {
    const auto p = make_set(Side::kPrefix, 0, 3, {{0, 0, 1}, {1, 1, 0}, {0, 1, 0}, {1, 1, 1}});
    const auto e = expand_rows(p, 2);
    CHECK(e.size() == 8);
    CHECK(e.length() == 4);
    CHECK(e.distinct());
  }
}

TEST_CASE("expand_cols prepends the mode value") {
  const auto s = make_set(Side::kSuffix, 2, 3, {{1}, {0}});
  const auto e = expand_cols(s, 3);
  CHECK(e.begin() == 1);
  CHECK(e.end() == 3);
  CHECK(members_of(e) ==
        std::vector<std::vector<int>>{{0, 1}, {1, 1}, {2, 1}, {0, 0}, {1, 0}, {2, 0}});
}

TEST_CASE("assemble_full_indices") {
  SECTION("two rows, one column") {
    const auto rows = make_set(Side::kPrefix, 0, 1, {{0}, {1}});
    const auto cols = make_set(Side::kSuffix, 1, 2, {{1}});
    CHECK(assemble_full_indices(rows, cols) == std::vector<MultiIndex>{{0, 1}, {1, 1}});
  }
  SECTION("row-major ordering") {
    const auto rows = make_set(Side::kPrefix, 0, 2, {{0, 0}, {0, 1}, {1, 0}, {1, 1}});
    const auto cols = make_set(Side::kSuffix, 2, 3, {{0}, {1}});
    const auto full = assemble_full_indices(rows, cols);
    REQUIRE(full.size() == 8);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 2; ++j)
        CHECK(full[i * 2 + j] == MultiIndex{rows[i][0], rows[i][1], cols[j][0]});
  }
  SECTION("hand enumeration over (2,2,2)") {
    const auto rows = make_set(Side::kPrefix, 0, 1, {{0}, {1}});
    const auto cols = make_set(Side::kSuffix, 1, 3, {{0, 0}, {1, 1}});
    CHECK(assemble_full_indices(rows, cols) ==
          std::vector<MultiIndex>{{0, 0, 0}, {0, 1, 1}, {1, 0, 0}, {1, 1, 1}});
  }
  SECTION("span mismatches") {
    const auto rows = make_set(Side::kPrefix, 0, 1, {{0}});
    CHECK_THROWS_AS(assemble_full_indices(rows, make_set(Side::kSuffix, 2, 3, {{0}})), InputError);
    CHECK_THROWS_AS(assemble_full_indices(rows, make_set(Side::kSuffix, 0, 2, {{0, 0}})), InputError);
    CHECK_THROWS_AS(assemble_full_indices(rows, make_set(Side::kPrefix, 1, 2, {{0}})), InputError);
  }
}

TEST_CASE("split_flat_row") {
  CHECK(split_flat_row(0, 2, 4) == std::pair<std::size_t, int>{0, 0});
  CHECK(split_flat_row(5, 2, 4) == std::pair<std::size_t, int>{2, 1});
  CHECK_THROWS_AS(split_flat_row(8, 2, 4), InputError);
}

TEST_CASE("expand_rows and split_flat_row round-trip") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 4;
    const std::size_t len = 1 + trial % 5;
    PartialIndexSet p(Side::kPrefix, 0, len);
    std::uniform_int_distribution<int> val(0, n - 1);
    for (int m = 0; m < 3 + trial % 4; ++m) {
      std::vector<int> e(len);
      for (int& v : e) v = val(rng);
      p.push_back(e);
    }
    const auto e = expand_rows(p, n);
    REQUIRE(e.size() == p.size() * static_cast<std::size_t>(n));
    for (std::size_t flat = 0; flat < e.size(); ++flat) {
      const auto [pos, v] = split_flat_row(flat, n, p.size());
      std::vector<int> rebuilt(p[pos].begin(), p[pos].end());
      rebuilt.push_back(v);
      CHECK(std::equal(rebuilt.begin(), rebuilt.end(), e[flat].begin(), e[flat].end()));
    }
  }
}

TEST_CASE("assembled indices are valid and complete") {
  const TensorShape shape({2, 3, 2, 4});
  const auto suffixes = random_suffix_sets(shape, 3, 9);
  auto rows = expand_rows(expand_rows(PartialIndexSet::unit(Side::kPrefix, 0), 2), 3);
  const auto& cols = suffixes[1];
  const auto full = assemble_full_indices(rows, cols);
  CHECK(full.size() == rows.size() * cols.size());
  for (const auto& idx : full) CHECK(is_valid_index(shape, idx));
}

TEST_CASE("linked levels materialize consistently") {
  const TensorShape shape = TensorShape::binary(6);
  const LinkedLevels links = random_suffix_links(shape, 3, 4);
  const auto sets = random_suffix_sets(shape, 3, 4);
  for (std::size_t k = 1; k < 6; ++k) CHECK(materialize_suffix(links, k) == sets[k - 1]);
  CHECK(materialize_suffix(links, 6) == PartialIndexSet::unit(Side::kSuffix, 6));

  LinkedLevels prefix(3);
  prefix[0] = {IndexLink{}};
  prefix[1] = {{0, 1}, {0, 0}};
  prefix[2] = {{1, 1}, {0, 0}};
  const auto p2 = materialize_prefix(prefix, 2);
  CHECK(members_of(p2) == std::vector<std::vector<int>>{{0, 1}, {1, 0}});
}

TEST_CASE("PartialIndexSet rejects wrong lengths") {
  PartialIndexSet s(Side::kPrefix, 0, 2);
  CHECK_THROWS_AS(s.push_back(std::vector<int>{1}), InputError);
  s.push_back(std::vector<int>{1, 0});
  s.push_back(std::vector<int>{1, 0});
  CHECK_FALSE(s.distinct());
}
