#include "ttqubo/synthetic.hpp"

#include <cmath>
#include <random>

#include "ttqubo/errors.hpp"

namespace ttqubo::qubo {

EntryDistribution parse_distribution(const std::string& name) {
  if (name == "uniform") return EntryDistribution::kUniform;
  if (name == "normal") return EntryDistribution::kNormal;
  throw InputError("unknown entry distribution '" + name + "' (uniform|normal)");
}

std::string to_string(EntryDistribution d) {
  return d == EntryDistribution::kUniform ? "uniform" : "normal";
}

void SyntheticSpec::validate() const {
  if (size == 0) throw InputError("synthetic size must be >= 1");
  if (!(density >= 0.0 && density <= 1.0)) throw InputError("density must lie in [0, 1]");
  if (constraint) constraint->validate();
}

QuboProblem generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  const std::size_t f = spec.size;
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> keep(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  DenseMatrix m(f, f);
  for (std::size_t i = 0; i < f; ++i) {
    for (std::size_t j = i; j < f; ++j) {
      if (spec.density < 1.0 && keep(rng) >= spec.density) continue;
      const double v =
          spec.distribution == EntryDistribution::kUniform ? uniform(rng) : normal(rng);
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  if (spec.constraint) return build_bqm(m, *spec.constraint);
  return QuboProblem(std::move(m));
}

QuboProblem random_dense(std::size_t f, std::uint64_t seed) {
  SyntheticSpec spec;
  spec.size = f;
  spec.seed = seed;
  return generate_synthetic(spec);
}

QuboProblem random_separable(std::size_t f, std::uint64_t seed) {
  if (f == 0) throw InputError("size must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> magnitude(0.1, 1.0);
  std::uniform_int_distribution<int> coin(0, 1);
  DenseMatrix m(f, f);
  for (std::size_t i = 0; i < f; ++i) m(i, i) = (coin(rng) ? 1.0 : -1.0) * magnitude(rng);
  return QuboProblem(std::move(m));
}

}  // namespace ttqubo::qubo
