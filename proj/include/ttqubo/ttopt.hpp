#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "ttqubo/errors.hpp"
#include "ttqubo/linalg.hpp"
#include "ttqubo/unfolding.hpp"

namespace ttqubo::ttopt {

/// Black-box function over the index grid of a tensor; TTOpt minimizes it.
/// Must be deterministic and return finite values for every valid index.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual const TensorShape& shape() const = 0;
  virtual double operator()(std::span<const int> index) const = 0;

  /// True when operator() may be called from several threads at once.
  virtual bool concurrent_safe() const { return false; }

  /// Values of the first out.size() points of the rows x cols grid, row-major.
  /// The default assembles every full index and calls operator(), spreading
  /// the points over `threads` workers when concurrent_safe().
  virtual void evaluate_block(const PartialIndexSet& rows, const PartialIndexSet& cols,
                              std::span<double> out, unsigned threads) const;

  /// False when evaluate_block may differ from operator() in the last bits
  /// (for example when it uses incremental updates). The optimizer then
  /// settles near ties and the final optimum with operator(), charging those
  /// calls to the budget and keeping one call in reserve for the last.
  virtual bool block_exact() const { return true; }
};

/// Adapts a plain callable.
class FunctionObjective final : public Objective {
 public:
  using Function = std::function<double(std::span<const int>)>;

  FunctionObjective(TensorShape shape, Function f, bool concurrent_safe = false)
      : shape_(std::move(shape)), f_(std::move(f)), concurrent_safe_(concurrent_safe) {}

  const TensorShape& shape() const override { return shape_; }
  double operator()(std::span<const int> index) const override { return f_(index); }
  bool concurrent_safe() const override { return concurrent_safe_; }

 private:
  TensorShape shape_;
  Function f_;
  bool concurrent_safe_;
};

/// Objective returned NaN or infinity.
class NonFiniteValueError : public Error {
 public:
  NonFiniteValueError(MultiIndex index, double value);
  const MultiIndex& index() const noexcept { return index_; }

 private:
  MultiIndex index_;
};

enum class Direction : std::uint8_t { kForward, kBackward };

/// Snapshot handed to TtOptConfig::on_step after every completed step.
struct StepRecord {
  std::size_t position = 0;
  Direction direction = Direction::kForward;
  /// Grid points evaluated by this step.
  std::size_t evaluations = 0;
  /// Raw objective values as the maxvol input matrix (rows = candidates);
  /// for backward steps this is the transpose of the evaluation grid.
  linalg::DenseMatrix raw;
  /// Mapped values actually passed to the row selection.
  linalg::DenseMatrix mapped;
  double y_min = 0.0;
  std::vector<std::size_t> selected;
  bool used_fallback = false;
};

struct TtOptConfig {
  std::size_t rank = 4;
  std::size_t budget = 0;
  std::uint64_t seed = 0;
  double maxvol_tau = linalg::kDefaultMaxvolTau;
  std::size_t maxvol_max_iters = linalg::kDefaultMaxvolIters;
  /// When set, the mapping reference starts here instead of at the first
  /// grid's minimum (it still follows the best value once that is lower).
  std::optional<double> initial_y_min;
  /// Workers for evaluate_block; results never depend on this.
  unsigned threads = 1;
  std::function<void(const StepRecord&)> on_step;
};

struct TraceRecord {
  std::size_t evaluations = 0;
  double best_value = 0.0;
  double seconds = 0.0;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

/// Improvement history: one record per new best value.
struct Trace {
  std::vector<TraceRecord> records;

  /// CSV with header `evals,best_value,seconds`.
  void write_csv(std::ostream& os) const;
};

struct OptResult {
  MultiIndex best_index;
  double best_value = 0.0;
  std::size_t evaluations_used = 0;
  std::size_t sweeps_completed = 0;
  Trace trace;
};

/// pi/2 - atan(value - y_min): maps small values to large ones, in (0, pi).
double map_value(double value, double y_min);
linalg::DenseMatrix map_values(const linalg::DenseMatrix& values, double y_min);

/// Objective calls spent by `sweeps` full sweeps: 2 * d * max_mode * rank^2 *
/// sweeps. Throws InputError for zero inputs and OverflowError when the
/// result does not fit.
std::size_t compute_budget(std::size_t d, std::size_t max_mode, std::size_t rank,
                           std::size_t sweeps);

/// Index sets and running optimum of a TTOpt run.
///
/// Prefix level k holds the row multi-indices over modes [0, k) chosen by the
/// forward step at position k - 1; suffix level k holds the column
/// multi-indices over [k, d) chosen by the backward step at position k (or
/// drawn at random before the first backward pass).
class SweepState {
 public:
  SweepState(TensorShape shape, const TtOptConfig& config);

  const TensorShape& shape() const noexcept { return shape_; }
  const TtOptConfig& config() const noexcept { return config_; }

  PartialIndexSet prefix_set(std::size_t k) const;
  PartialIndexSet suffix_set(std::size_t k) const;
  std::size_t prefix_size(std::size_t k) const { return prefixes_.at(k).size(); }
  std::size_t suffix_size(std::size_t k) const { return suffixes_.at(k).size(); }

  std::size_t evaluations_used() const noexcept { return evaluations_; }
  std::size_t remaining_budget() const noexcept { return config_.budget - evaluations_; }
  bool terminal() const noexcept { return terminal_; }

  bool has_best() const noexcept { return !best_index_.empty(); }
  /// With an inexact evaluate_block the best value may carry block rounding
  /// until confirm_best() re-evaluates it; optimize() always confirms.
  const MultiIndex& best_index() const noexcept { return best_index_; }
  double best_value() const noexcept { return best_value_; }
  const Trace& trace() const noexcept { return trace_; }

  /// Replaces the best value (and the last trace record) by objective(best),
  /// spending one evaluation. Throws std::logic_error with no budget left.
  void confirm_best(const Objective& objective);

  /// Reference value for the mapping at the next step.
  double y_min() const;

 private:
  friend void sweep_step(SweepState&, std::size_t, Direction, const Objective&);
  friend OptResult optimize(const Objective&, const TtOptConfig&);

  TensorShape shape_;
  TtOptConfig config_;
  LinkedLevels prefixes_;
  LinkedLevels suffixes_;
  // Generation counters guarding against reading a level built on top of a
  // neighbour that has since been replaced.
  std::vector<std::uint64_t> prefix_gen_;
  std::vector<std::uint64_t> prefix_parent_gen_;
  std::vector<std::uint64_t> suffix_gen_;
  std::vector<std::uint64_t> suffix_parent_gen_;
  std::uint64_t next_gen_ = 1;

  std::size_t evaluations_ = 0;
  bool terminal_ = false;
  MultiIndex best_index_;
  double best_value_ = 0.0;
  bool best_confirmed_ = true;
  Trace trace_;
  std::chrono::steady_clock::time_point start_;
};

/// One step of a sweep at 0-based mode `position`.
///
/// Forward: rows are the prefix level `position` expanded by that mode,
/// columns the suffix level `position + 1`; the selected rows become prefix
/// level `position + 1`. Backward: columns are suffix level `position + 1`
/// expanded by that mode, rows the prefix level `position`; the selected
/// columns become suffix level `position`. At most the remaining budget is
/// spent; a truncated grid updates the optimum and marks the state terminal.
void sweep_step(SweepState& state, std::size_t position, Direction direction,
                const Objective& objective);

/// Alternates forward (positions 0..d-1) and backward (d-1..0) passes until
/// the budget is spent. The result is a pure function of the objective and
/// the config (threads excepted).
OptResult optimize(const Objective& objective, const TtOptConfig& config);

}  // namespace ttqubo::ttopt
