#include "ttqubo/baselines.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <sstream>

#include "ttqubo/errors.hpp"

namespace ttqubo::baselines {

namespace {

void check_exhaustive_size(const QuboProblem& q) {
  if (q.size() > kExhaustiveMaxSize) {
    std::ostringstream os;
    os << "exhaustive search refused: F = " << q.size() << " exceeds the guard F <= "
       << kExhaustiveMaxSize;
    throw LimitError(os.str());
  }
  if (q.size() == 0) throw InputError("QUBO problem has no variables");
}

BinaryVector decode(std::uint32_t code, std::size_t f) {
  BinaryVector x(f);
  for (std::size_t i = 0; i < f; ++i) x[i] = (code >> i) & 1u;
  return x;
}

// Keeps the smallest canonical value, lexicographically smallest x on ties.
struct Champion {
  BinaryVector x;
  double value = 0.0;
  bool set = false;

  void offer(BinaryVector cand, double v) {
    if (!set || v < value || (v == value && lex_less(cand, x))) {
      x = std::move(cand);
      value = v;
      set = true;
    }
  }
};

}  // namespace

bool lex_less(const BinaryVector& a, const BinaryVector& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

SolverResult exhaustive(const QuboProblem& q) {
  check_exhaustive_size(q);
  const std::size_t f = q.size();
  const auto& m = q.matrix();
  double abs_sum = 0.0;
  for (double v : m.data()) abs_sum += std::abs(v);
  // Incremental values drift by rounding; anything within `tol` of the best
  // incremental value is re-scored with evaluate().
  const double tol = 1e-9 * (1.0 + abs_sum);

  std::vector<double> h(f, 0.0);
  BinaryVector x(f, 0);
  std::uint32_t code = 0;
  double value = 0.0;
  double best_inc = 0.0;
  Champion champion;
  champion.offer(x, 0.0);

  const std::uint64_t total = std::uint64_t{1} << f;
  for (std::uint64_t t = 1; t < total; ++t) {
    const std::size_t k = static_cast<std::size_t>(std::countr_zero(t));
    const double delta_sign = x[k] ? -1.0 : 1.0;
    const double qkk = m(k, k);
    value += delta_sign * (2.0 * (h[k] - qkk * x[k]) + qkk);
    x[k] ^= 1;
    code ^= 1u << k;
    const auto row = m.row(k);
    for (std::size_t j = 0; j < f; ++j) h[j] += delta_sign * row[j];
    if (value <= best_inc + tol) {
      best_inc = std::min(best_inc, value);
      BinaryVector cand = decode(code, f);
      const double exact = qubo::evaluate(q, cand);
      champion.offer(std::move(cand), exact);
    }
  }
  return {std::move(champion.x), champion.value, static_cast<std::size_t>(total)};
}

SolverResult exhaustive_naive(const QuboProblem& q) {
  check_exhaustive_size(q);
  const std::size_t f = q.size();
  const std::uint64_t total = std::uint64_t{1} << f;
  Champion champion;
  for (std::uint64_t c = 0; c < total; ++c) {
    BinaryVector x = decode(static_cast<std::uint32_t>(c), f);
    const double v = qubo::evaluate(q, x);
    champion.offer(std::move(x), v);
  }
  return {std::move(champion.x), champion.value, static_cast<std::size_t>(total)};
}

SaSchedule SaSchedule::defaults(const QuboProblem& q, std::size_t steps, std::uint64_t seed) {
  double t0 = q.max_abs();
  if (t0 == 0.0) t0 = 1.0;
  return {t0, 1e-3 * t0, steps, seed};
}

void SaSchedule::validate() const {
  if (!(final_temperature > 0.0) || !std::isfinite(initial_temperature) ||
      !(initial_temperature >= final_temperature))
    throw InputError("SA schedule needs initial >= final > 0");
  if (steps == 0) throw InputError("SA schedule needs steps >= 1");
}

SolverResult simulated_annealing(const QuboProblem& q, const SaSchedule& schedule) {
  schedule.validate();
  const std::size_t f = q.size();
  if (f == 0) throw InputError("QUBO problem has no variables");
  const auto& m = q.matrix();
  std::mt19937_64 rng(schedule.seed);
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_int_distribution<std::size_t> pick(0, f - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  BinaryVector x(f);
  for (auto& b : x) b = static_cast<std::uint8_t>(coin(rng));
  std::vector<double> h(f, 0.0);
  for (std::size_t i = 0; i < f; ++i) {
    if (!x[i]) continue;
    const auto row = m.row(i);
    for (std::size_t j = 0; j < f; ++j) h[j] += row[j];
  }
  double value = qubo::evaluate(q, x);
  BinaryVector best = x;
  double best_value = value;

  const double ratio = schedule.final_temperature / schedule.initial_temperature;
  const double denom = schedule.steps > 1 ? static_cast<double>(schedule.steps - 1) : 1.0;
  for (std::size_t t = 0; t < schedule.steps; ++t) {
    const double temperature =
        schedule.initial_temperature * std::pow(ratio, static_cast<double>(t) / denom);
    const std::size_t k = pick(rng);
    const double sign = x[k] ? -1.0 : 1.0;
    const double qkk = m(k, k);
    const double delta = sign * (2.0 * (h[k] - qkk * x[k]) + qkk);
    const double u = unit(rng);
    if (delta <= 0.0 || u < std::exp(-delta / temperature)) {
      x[k] ^= 1;
      value += delta;
      const auto row = m.row(k);
      for (std::size_t j = 0; j < f; ++j) h[j] += sign * row[j];
      if (value < best_value) {
        best_value = value;
        best = x;
      }
    }
  }
  const double exact = qubo::evaluate(q, best);
  return {std::move(best), exact, schedule.steps};
}

SolverResult random_search(const QuboProblem& q, std::size_t samples, std::uint64_t seed) {
  if (samples == 0) throw InputError("random search needs samples >= 1");
  const std::size_t f = q.size();
  if (f == 0) throw InputError("QUBO problem has no variables");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> coin(0, 1);
  BinaryVector best;
  double best_value = 0.0;
  BinaryVector x(f);
  for (std::size_t s = 0; s < samples; ++s) {
    for (auto& b : x) b = static_cast<std::uint8_t>(coin(rng));
    const double v = qubo::evaluate(q, x);
    if (best.empty() || v < best_value) {
      best = x;
      best_value = v;
    }
  }
  return {std::move(best), best_value, samples};
}

}  // namespace ttqubo::baselines
