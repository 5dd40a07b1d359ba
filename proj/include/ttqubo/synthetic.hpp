#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "ttqubo/qubo.hpp"

namespace ttqubo::qubo {

enum class EntryDistribution : std::uint8_t { kUniform, kNormal };

/// Parses "uniform" or "normal"; throws InputError otherwise.
EntryDistribution parse_distribution(const std::string& name);
std::string to_string(EntryDistribution d);

/// Random symmetric QUBO. Each upper-triangle entry is nonzero with
/// probability `density` and then drawn from uniform[-1, 1] or N(0, 1).
/// With a constraint, the matrix is passed through build_bqm.
struct SyntheticSpec {
  std::size_t size = 0;
  double density = 1.0;
  EntryDistribution distribution = EntryDistribution::kUniform;
  std::optional<ConstraintSpec> constraint;
  std::uint64_t seed = 0;

  void validate() const;
};

QuboProblem generate_synthetic(const SyntheticSpec& spec);

/// Dense uniform[-1, 1] instance of size f.
QuboProblem random_dense(std::size_t f, std::uint64_t seed);

/// Diagonal instance with entries drawn uniformly from [-1, -0.1] u [0.1, 1].
QuboProblem random_separable(std::size_t f, std::uint64_t seed);

}  // namespace ttqubo::qubo
