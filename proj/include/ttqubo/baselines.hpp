#pragma once

#include <cstddef>
#include <cstdint>

#include "ttqubo/qubo.hpp"

namespace ttqubo::baselines {

using qubo::BinaryVector;
using qubo::QuboProblem;

struct SolverResult {
  BinaryVector x;
  /// evaluate(q, x), recomputed from scratch.
  double value = 0.0;
  /// Objective evaluations (or single-flip updates) spent.
  std::size_t evaluations = 0;
};

/// Largest F accepted by exhaustive().
inline constexpr std::size_t kExhaustiveMaxSize = 24;

/// Global minimum over all 2^F vectors by Gray-code enumeration with O(F)
/// updates per flip. Ties go to the lexicographically smallest x (x[0] first).
/// Throws LimitError when F > kExhaustiveMaxSize.
SolverResult exhaustive(const QuboProblem& q);

/// Plain enumeration with evaluate() at every point; same tie rule. Slow,
/// kept as a reference.
SolverResult exhaustive_naive(const QuboProblem& q);

struct SaSchedule {
  double initial_temperature = 1.0;
  double final_temperature = 1e-3;
  std::size_t steps = 1000;
  std::uint64_t seed = 0;

  /// initial = max|Q| (1 for the zero matrix), final = 1e-3 * initial.
  static SaSchedule defaults(const QuboProblem& q, std::size_t steps, std::uint64_t seed);

  /// Throws InputError unless initial >= final > 0 and steps >= 1.
  void validate() const;
};

/// Single-flip Metropolis chain from a random start with geometric cooling;
/// returns the best state ever visited. One evaluation per step.
SolverResult simulated_annealing(const QuboProblem& q, const SaSchedule& schedule);

/// Best of `samples` uniform random vectors. Throws InputError for 0 samples.
SolverResult random_search(const QuboProblem& q, std::size_t samples, std::uint64_t seed);

/// True when a precedes b in lexicographic order.
bool lex_less(const BinaryVector& a, const BinaryVector& b);

}  // namespace ttqubo::baselines
