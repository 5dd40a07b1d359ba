#include <random>
#include <set>
#include <thread>

#include "catch_amalgamated.hpp"
#include "catch_printers.hpp"
#include "oracles.hpp"
#include "ttqubo/errors.hpp"
#include "ttqubo/qubo.hpp"
#include "ttqubo/synthetic.hpp"
#include "ttqubo/unfolding.hpp"

using namespace ttqubo;
using namespace ttqubo::qubo;
using Catch::Approx;

namespace {

BinaryVector random_x(std::size_t f, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> coin(0, 1);
  BinaryVector x(f);
  for (auto& b : x) b = static_cast<std::uint8_t>(coin(rng));
  return x;
}

DenseMatrix dense_product(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k)
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += a(i, k) * b(k, j);
  return c;
}

SparseMatrix random_sparse(std::size_t n, double fill, std::uint64_t seed, double lo, double hi) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> keep(0.0, 1.0);
  std::uniform_real_distribution<double> val(lo, hi);
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (keep(rng) < fill) t.push_back({i, j, val(rng)});
  return SparseMatrix(n, n, t);
}

SparseBinaryMatrix random_icm(std::size_t items, std::size_t features, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> keep(0.0, 1.0);
  std::vector<std::pair<std::size_t, std::size_t>> ones;
  for (std::size_t i = 0; i < items; ++i)
    for (std::size_t j = 0; j < features; ++j)
      if (keep(rng) < 0.3) ones.emplace_back(i, j);
  return SparseBinaryMatrix(items, features, ones);
}

double constraint_term(const BinaryVector& x, const ConstraintSpec& c) {
  double ones = 0.0;
  for (auto b : x) ones += b;
  const double dev = ones - c.target_fraction * static_cast<double>(x.size());
  return c.strength * dev * dev;
}

}  // namespace

TEST_CASE("evaluate") {
  const QuboProblem q(DenseMatrix{{1, 2}, {2, -3}});
  CHECK(evaluate(q, BinaryVector{0, 0}) == 0.0);
  CHECK(evaluate(q, BinaryVector{1, 1}) == 2.0);
  CHECK(evaluate(q, BinaryVector{0, 1}) == -3.0);
  const QuboProblem id(DenseMatrix::identity(5));
  CHECK(evaluate(id, BinaryVector(5, 1)) == 5.0);
  CHECK(evaluate(id, BinaryVector(5, 0)) == 0.0);
  CHECK_THROWS_AS(evaluate(q, BinaryVector{1}), InputError);
  CHECK_THROWS_AS(evaluate(q, BinaryVector{1, 2}), InputError);
}

TEST_CASE("QuboProblem symmetrizes its input") {
  const DenseMatrix a{{1, 4}, {0, 2}};
  const QuboProblem q(a);
  CHECK(q(0, 1) == 2.0);
  CHECK(q(1, 0) == 2.0);
  std::mt19937_64 rng(1);
  const DenseMatrix raw = oracle::random_matrix(7, 7, 9);
  const QuboProblem sym(raw);
  for (int t = 0; t < 30; ++t) {
    const BinaryVector x = random_x(7, rng);
    CHECK(evaluate(sym, x) == Approx(oracle::naive_quadratic(raw, x)).margin(1e-12));
  }
  CHECK_THROWS_AS(QuboProblem(DenseMatrix(2, 3)), InputError);
  DenseMatrix bad = DenseMatrix::identity(2);
  bad(0, 1) = std::nan("");
  CHECK_THROWS_AS(QuboProblem(bad), InputError);
}

TEST_CASE("upper triplets round-trip") {
  const auto q = random_dense(9, 4);
  const auto t = q.upper_triplets();
  CHECK(t.size() == q.upper_nonzeros());
  const auto back = QuboProblem::from_upper_triplets(9, t);
  CHECK(back.matrix() == q.matrix());
  const std::vector<Triplet> lower{{1, 0, 2.0}};
  CHECK_THROWS_AS(QuboProblem::from_upper_triplets(2, lower), InputError);
}

TEST_CASE("selected_fraction") {
  CHECK(selected_fraction(BinaryVector(4, 1)) == 1.0);
  CHECK(selected_fraction(BinaryVector(4, 0)) == 0.0);
  BinaryVector x(79, 1);
  x[3] = 0;
  x[40] = 0;
  CHECK(selected_fraction(x) == Approx(0.9747).margin(5e-5));
  CHECK_THROWS_AS(selected_fraction(BinaryVector{}), InputError);
}

TEST_CASE("as_objective agrees with evaluate") {
  const QuboProblem d(DenseMatrix{{-1, 0}, {0, -1}});
  const QuboObjective obj = as_objective(d);
  CHECK(obj(std::vector<int>{1, 1}) == -2.0);
  CHECK(obj.concurrent_safe());
  CHECK(obj.shape() == TensorShape::binary(2));

  const auto q = random_dense(4, 12);
  const QuboObjective o4 = as_objective(q);
  for (std::uint64_t c = 0; c < 16; ++c) {
    const auto x = oracle::bits_of(c, 4);
    const std::vector<int> idx(x.begin(), x.end());
    CHECK(o4(idx) == evaluate(q, x));
    CHECK(o4(idx) == o4(idx));
  }
  CHECK_THROWS_AS(o4(std::vector<int>{1, 0, 2, 0}), InputError);
  CHECK_THROWS_AS(o4(std::vector<int>{1, 0}), InputError);
}

TEST_CASE("QuboObjective is safe under concurrent calls") {
  const auto q = random_dense(30, 2);
  const QuboObjective obj(q);
  std::vector<std::vector<int>> points;
  std::mt19937_64 rng(4);
  for (int i = 0; i < 64; ++i) {
    const auto x = random_x(30, rng);
    points.emplace_back(x.begin(), x.end());
  }
  std::vector<double> seq, par(points.size());
  for (const auto& p : points) seq.push_back(obj(p));
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < 4; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < points.size(); i += 4) par[i] = obj(points[i]);
      });
  }
  CHECK(seq == par);
}

TEST_CASE("block evaluation matches per-point evaluation") {
  // Random nested grids in the order a sweep visits them, so every cache
  // path (hot parents, cached quads, ancestor walks, fresh entries) is hit.
  const std::size_t f = 24;
  const auto q = random_dense(f, 99);
  const QuboObjective obj(q);
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> coin(0, 1);
  const auto random_set = [&](Side side, std::size_t begin, std::size_t end, std::size_t n) {
    PartialIndexSet s(side, begin, end);
    std::set<std::vector<int>> seen;
    while (s.size() < n && seen.size() < (std::size_t{1} << std::min<std::size_t>(end - begin, 20))) {
      std::vector<int> e(end - begin);
      for (int& v : e) v = coin(rng);
      if (seen.insert(e).second) s.push_back(e);
    }
    return s;
  };
  std::size_t checked = 0;
  for (int round = 0; round < 3; ++round) {
    PartialIndexSet prefix = PartialIndexSet::unit(Side::kPrefix, 0);
    for (std::size_t k = 0; k < f; ++k) {
      const PartialIndexSet rows = expand_rows(prefix, 2);
      const PartialIndexSet cols =
          k + 1 == f ? PartialIndexSet::unit(Side::kSuffix, f) : random_set(Side::kSuffix, k + 1, f, 4);
      std::vector<double> out(rows.size() * cols.size() - (k % 3));
      obj.evaluate_block(rows, cols, out, 1);
      const auto full = assemble_full_indices(rows, cols);
      for (std::size_t p = 0; p < out.size(); ++p) {
        CHECK(out[p] == Approx(obj(full[p])).epsilon(1e-12).margin(1e-12));
        ++checked;
      }
      // Keep a random subset of the expanded rows, as maxvol would.
      PartialIndexSet next(Side::kPrefix, 0, k + 1);
      for (std::size_t i = 0; i < rows.size() && next.size() < 4; ++i)
        if (coin(rng) || rows.size() - i <= 4 - next.size()) next.push_back(rows[i]);
      prefix = next;
    }
    PartialIndexSet suffix = PartialIndexSet::unit(Side::kSuffix, f);
    for (std::size_t k = f; k-- > 0;) {
      const PartialIndexSet cols = expand_cols(suffix, 2);
      const PartialIndexSet rows =
          k == 0 ? PartialIndexSet::unit(Side::kPrefix, 0) : random_set(Side::kPrefix, 0, k, 4);
      std::vector<double> out(rows.size() * cols.size());
      obj.evaluate_block(rows, cols, out, 1);
      const auto full = assemble_full_indices(rows, cols);
      for (std::size_t p = 0; p < out.size(); ++p) {
        CHECK(out[p] == Approx(obj(full[p])).epsilon(1e-12).margin(1e-12));
        ++checked;
      }
      PartialIndexSet next(Side::kSuffix, k, f);
      for (std::size_t i = 0; i < cols.size() && next.size() < 4; ++i)
        if (coin(rng) || cols.size() - i <= 4 - next.size()) next.push_back(cols[i]);
      suffix = next;
    }
  }
  CHECK(checked > 1000);
  CHECK(obj.cached_entries() > 0);
}

TEST_CASE("block evaluation rejects foreign grids") {
  const auto q = random_dense(4, 1);
  const QuboObjective obj(q);
  std::vector<double> out(2);
  PartialIndexSet rows(Side::kPrefix, 0, 1);
  rows.push_back(std::vector<int>{1});
  PartialIndexSet cols(Side::kSuffix, 2, 4);
  cols.push_back(std::vector<int>{0, 1});
  CHECK_THROWS_AS(obj.evaluate_block(rows, cols, out, 1), InputError);
  PartialIndexSet cols3(Side::kSuffix, 1, 4);
  cols3.push_back(std::vector<int>{0, 1, 3});
  CHECK_THROWS_AS(obj.evaluate_block(rows, cols3, out, 1), InputError);
}

TEST_CASE("build_ipm follows the case table") {
  const std::vector<Triplet> cbf{{0, 0, 0.5}, {0, 1, 0.5}, {1, 0, 0.0}, {1, 1, 0.5}};
  const std::vector<Triplet> cf{{0, 0, 0.5}, {1, 0, 0.7}, {1, 1, 1e-12}};
  const auto ipm = build_ipm(SparseMatrix(2, 2, cbf), SparseMatrix(2, 2, cf), 1e-9);
  CHECK(ipm.reward.at(0, 0) == -1.0);
  CHECK(ipm.penalty.at(0, 0) == 0.0);
  CHECK(ipm.reward.at(0, 1) == 0.0);
  CHECK(ipm.penalty.at(0, 1) == 1.0);
  CHECK(ipm.reward.at(1, 0) == 0.0);
  CHECK(ipm.penalty.at(1, 0) == 0.0);
  CHECK(ipm.reward.at(1, 1) == 0.0);
  CHECK(ipm.penalty.at(1, 1) == 1.0);

  CHECK_THROWS_AS(build_ipm(SparseMatrix(2, 2, cbf), SparseMatrix(3, 3, {}), 1e-9), InputError);
  CHECK_THROWS_AS(build_ipm(SparseMatrix(2, 2, cbf), SparseMatrix(2, 2, cf), 0.0), InputError);
  const std::vector<Triplet> negative{{0, 1, -0.5}};
  CHECK_THROWS_AS(build_ipm(SparseMatrix(2, 2, negative), SparseMatrix(2, 2, cf), 1e-9), InputError);
}

TEST_CASE("build_ipm value sets") {
  const auto cbf = random_sparse(30, 0.4, 1, 0.0, 1.0);
  const auto cf = random_sparse(30, 0.4, 2, 0.0, 1.0);
  const auto ipm = build_ipm(cbf, cf, 0.05);
  const DenseMatrix reward = ipm.reward.to_dense();
  const DenseMatrix penalty = ipm.penalty.to_dense();
  for (double v : reward.data()) CHECK((v == 0.0 || v == -1.0));
  for (double v : penalty.data()) CHECK((v == 0.0 || v == 1.0));
  CHECK(ipm.reward.nonzeros() > 0);
  CHECK(ipm.penalty.nonzeros() > 0);
}

TEST_CASE("build_fpm") {
  SECTION("zero IPM gives zero parts") {
    const SparseBinaryMatrix icm(3, 2, {{0, 0}, {1, 1}, {2, 0}});
    const IpmComponents ipm{SparseMatrix(3, 3, {}), SparseMatrix(3, 3, {})};
    const auto fpm = build_fpm(icm, ipm);
    CHECK(fpm.reward_part == DenseMatrix(2, 2));
    CHECK(fpm.penalty_part == DenseMatrix(2, 2));
  }
  SECTION("identity ICM returns the IPM parts") {
    const SparseBinaryMatrix icm(2, 2, {{0, 0}, {1, 1}});
    const IpmComponents ipm{SparseMatrix(2, 2, {{0, 1, -1.0}}), SparseMatrix(2, 2, {{1, 1, 1.0}, {1, 0, 1.0}})};
    const auto fpm = build_fpm(icm, ipm);
    CHECK(fpm.reward_part == ipm.reward.to_dense());
    CHECK(fpm.penalty_part == ipm.penalty.to_dense());
  }
  SECTION("I=3, F=2 against hand-computed dense products") {
    // ICM rows: item0 -> {f0}, item1 -> {f0, f1}, item2 -> {f1}.
    const SparseBinaryMatrix icm(3, 2, {{0, 0}, {1, 0}, {1, 1}, {2, 1}});
    const IpmComponents ipm{SparseMatrix(3, 3, {{0, 1, -1.0}, {1, 2, -1.0}, {2, 2, -1.0}}),
                            SparseMatrix(3, 3, {{0, 0, 1.0}, {2, 0, 1.0}})};
    const auto fpm = build_fpm(icm, ipm);
    // reward: ICM^T R ICM = [[-1, -2], [0, -2]]; penalty: [[1, 0], [1, 0]].
    CHECK(fpm.reward_part == DenseMatrix{{-1, -2}, {0, -2}});
    CHECK(fpm.penalty_part == DenseMatrix{{1, 0}, {1, 0}});
  }
  SECTION("random instances against a dense triple product") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto icm = random_icm(25, 8, seed);
      const auto ipm = build_ipm(random_sparse(25, 0.3, 10 + seed, 0.0, 1.0),
                                 random_sparse(25, 0.3, 20 + seed, 0.0, 1.0), 0.2);
      const auto fpm = build_fpm(icm, ipm);
      const DenseMatrix c = icm.to_dense();
      const DenseMatrix ct = c.transposed();
      CHECK(fpm.reward_part == dense_product(dense_product(ct, ipm.reward.to_dense()), c));
      CHECK(fpm.penalty_part == dense_product(dense_product(ct, ipm.penalty.to_dense()), c));
    }
  }
  SECTION("linear in the IPM") {
    const auto icm = random_icm(20, 6, 3);
    const auto ipm = build_ipm(random_sparse(20, 0.3, 4, 0.0, 1.0), random_sparse(20, 0.3, 5, 0.0, 1.0), 0.2);
    const auto scale = [](const SparseMatrix& m) {
      auto t = m.triplets();
      for (auto& e : t) e.value *= 2.0;
      return SparseMatrix(m.rows(), m.cols(), t);
    };
    const auto base = build_fpm(icm, ipm);
    const auto doubled = build_fpm(icm, IpmComponents{scale(ipm.reward), scale(ipm.penalty)});
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t j = 0; j < 6; ++j) {
        CHECK(doubled.reward_part(i, j) == 2.0 * base.reward_part(i, j));
        CHECK(doubled.penalty_part(i, j) == 2.0 * base.penalty_part(i, j));
      }
  }
  SECTION("dimension mismatch") {
    const SparseBinaryMatrix icm(3, 2, {{0, 0}});
    const IpmComponents ipm{SparseMatrix(2, 2, {}), SparseMatrix(2, 2, {})};
    CHECK_THROWS_AS(build_fpm(icm, ipm), InputError);
  }
}

TEST_CASE("assemble_fpm") {
  const FpmComponents parts{DenseMatrix{{-1, -2}, {0, -3}}, DenseMatrix{{1, 2}, {0, 3}}};
  CHECK(assemble_fpm(parts, 0.0) == parts.reward_part);
  CHECK(assemble_fpm(parts, 1.0) == DenseMatrix(2, 2));
  const FpmComponents random{oracle::random_matrix(5, 5, 1), oracle::random_matrix(5, 5, 2)};
  const auto a = assemble_fpm(random, 0.001);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j)
      CHECK(a(i, j) == Approx(random.reward_part(i, j) + 0.001 * random.penalty_part(i, j)));
  CHECK_THROWS_AS(assemble_fpm(random, std::nan("")), InputError);
}

TEST_CASE("build_bqm folds the constraint") {
  SECTION("s = 0 leaves the FPM") {
    const DenseMatrix fpm = QuboProblem(oracle::random_matrix(4, 4, 7)).matrix();
    CHECK(build_bqm(fpm, {0.0, 0.5}).matrix() == fpm);
  }
  SECTION("F = 3, s = 1, p = 1/3 has offset -1") {
    const DenseMatrix fpm = QuboProblem(oracle::random_matrix(3, 3, 8)).matrix();
    const ConstraintSpec c{1.0, 1.0 / 3.0};
    const auto bqm = build_bqm(fpm, c);
    std::mt19937_64 rng(2);
    for (int t = 0; t < 8; ++t) {
      const auto x = random_x(3, rng);
      const double diff = evaluate(bqm, x) - (oracle::naive_quadratic(fpm, x) + constraint_term(x, c));
      CHECK(diff == Approx(-1.0).margin(1e-12));
    }
    CHECK(bqm_offset(3, c) == Approx(-1.0));
  }
  SECTION("F = 10, s = 100, p = 0.4") {
    const DenseMatrix fpm = QuboProblem(oracle::random_matrix(10, 10, 9)).matrix();
    const ConstraintSpec c{100.0, 0.4};
    const auto bqm = build_bqm(fpm, c);
    std::mt19937_64 rng(3);
    for (int t = 0; t < 50; ++t) {
      const auto x = random_x(10, rng);
      const double offset = evaluate(bqm, x) - oracle::naive_quadratic(fpm, x) - constraint_term(x, c);
      CHECK(offset == Approx(-1600.0).epsilon(1e-9));
    }
  }
  SECTION("pure constraint matrix") {
    const auto bqm = build_bqm(DenseMatrix(3, 3), {2.0, 0.5});
    CHECK(bqm.matrix() == DenseMatrix{{-4, 2, 2}, {2, -4, 2}, {2, 2, -4}});
  }
  SECTION("invalid constraint") {
    CHECK_THROWS_AS(build_bqm(DenseMatrix(2, 2), {-1.0, 0.5}), InputError);
    CHECK_THROWS_AS(build_bqm(DenseMatrix(2, 2), {1.0, 1.5}), InputError);
    CHECK_THROWS_AS(build_bqm(DenseMatrix(2, 3), {1.0, 0.5}), InputError);
  }
}

TEST_CASE("BQM argmin equals constrained FPM argmin on F <= 12") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const DenseMatrix fpm = QuboProblem(oracle::random_matrix(10, 10, 40 + seed)).matrix();
    const ConstraintSpec c{0.5 + seed, 0.3};
    const auto bqm = build_bqm(fpm, c);
    const auto a = oracle::brute_force(10, [&](const BinaryVector& x) { return evaluate(bqm, x); });
    const auto b = oracle::brute_force(10, [&](const BinaryVector& x) {
      return oracle::naive_quadratic(fpm, x) + constraint_term(x, c);
    });
    CHECK(a.first == b.first);
    CHECK(a.second - b.second == Approx(bqm_offset(10, c)).epsilon(1e-9));
  }
}

TEST_CASE("sparse containers validate entries") {
  CHECK_THROWS_AS(SparseMatrix(2, 2, {{0, 0, 1.0}, {0, 0, 2.0}}), InputError);
  CHECK_THROWS_AS(SparseMatrix(2, 2, {{2, 0, 1.0}}), InputError);
  CHECK_THROWS_AS(SparseMatrix(2, 2, {{0, 0, std::nan("")}}), InputError);
  CHECK_THROWS_AS(SparseBinaryMatrix(2, 2, {{0, 1}, {0, 1}}), InputError);
  CHECK_THROWS_AS(SparseBinaryMatrix(2, 2, {{0, 2}}), InputError);
  const SparseMatrix m(3, 3, {{2, 1, 4.0}, {0, 2, -1.0}});
  CHECK(m.at(2, 1) == 4.0);
  CHECK(m.at(1, 1) == 0.0);
  CHECK(m.triplets() == std::vector<Triplet>{{0, 2, -1.0}, {2, 1, 4.0}});
}

TEST_CASE("synthetic generator") {
  const auto a = random_dense(15, 3);
  const auto b = random_dense(15, 3);
  CHECK(a.matrix() == b.matrix());
  CHECK(a.max_abs() <= 1.0);
  SyntheticSpec sparse;
  sparse.size = 200;
  sparse.density = 0.1;
  sparse.distribution = EntryDistribution::kNormal;
  const auto s = generate_synthetic(sparse);
  const double fill = static_cast<double>(s.upper_nonzeros()) / (200.0 * 201.0 / 2.0);
  CHECK(fill == Approx(0.1).margin(0.02));
  sparse.constraint = ConstraintSpec{1.0, 0.5};
  const auto folded = generate_synthetic(sparse);
  CHECK(folded.matrix() == build_bqm(s.matrix(), {1.0, 0.5}).matrix());
  const auto sep = random_separable(30, 1);
  for (std::size_t i = 0; i < 30; ++i) CHECK(std::abs(sep(i, i)) >= 0.1);
  CHECK_THROWS_AS(parse_distribution("cauchy"), InputError);
  SyntheticSpec bad;
  CHECK_THROWS_AS(generate_synthetic(bad), InputError);
}
