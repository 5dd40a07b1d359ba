#include "ttqubo/ttopt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

#include <spdlog/spdlog.h>

namespace ttqubo::ttopt {

namespace {

constexpr double kConfirmSlack = 1e-9;

std::string non_finite_message(const MultiIndex& index, double value) {
  std::ostringstream os;
  os << "objective returned " << value << " at index [";
  for (std::size_t k = 0; k < index.size(); ++k) {
    if (k > 0) os << ",";
    if (k == 16 && index.size() > 20) {
      os << "... (" << index.size() << " modes)";
      break;
    }
    os << index[k];
  }
  os << "]";
  return os.str();
}

MultiIndex join(std::span<const int> prefix, std::span<const int> suffix) {
  MultiIndex idx;
  idx.reserve(prefix.size() + suffix.size());
  idx.insert(idx.end(), prefix.begin(), prefix.end());
  idx.insert(idx.end(), suffix.begin(), suffix.end());
  return idx;
}

}  // namespace

NonFiniteValueError::NonFiniteValueError(MultiIndex index, double value)
    : Error(non_finite_message(index, value)), index_(std::move(index)) {}

void Objective::evaluate_block(const PartialIndexSet& rows, const PartialIndexSet& cols,
                               std::span<double> out, unsigned threads) const {
  const auto indices = assemble_full_indices(rows, cols);
  if (out.size() > indices.size()) throw InputError("evaluate_block: output larger than grid");
  const std::size_t n = out.size();
  if (threads <= 1 || !concurrent_safe() || n < 2) {
    for (std::size_t i = 0; i < n; ++i) out[i] = (*this)(indices[i]);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(threads, n);
  const std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      for (std::size_t i = lo; i < hi; ++i) out[i] = (*this)(indices[i]);
    });
  }
}

void Trace::write_csv(std::ostream& os) const {
  os << "evals,best_value,seconds\n";
  const auto old_precision = os.precision(std::numeric_limits<double>::max_digits10);
  for (const auto& r : records) os << r.evaluations << "," << r.best_value << "," << r.seconds << "\n";
  os.precision(old_precision);
}

double map_value(double value, double y_min) {
  return std::numbers::pi / 2.0 - std::atan(value - y_min);
}

linalg::DenseMatrix map_values(const linalg::DenseMatrix& values, double y_min) {
  linalg::DenseMatrix out(values.rows(), values.cols());
  const auto src = values.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = map_value(src[i], y_min);
  return out;
}

std::size_t compute_budget(std::size_t d, std::size_t max_mode, std::size_t rank,
                           std::size_t sweeps) {
  if (d == 0 || max_mode == 0 || rank == 0 || sweeps == 0)
    throw InputError("compute_budget: all arguments must be >= 1");
  std::size_t m = 2;
  for (std::size_t f : {d, max_mode, rank, rank, sweeps}) {
    if (__builtin_mul_overflow(m, f, &m)) {
      std::ostringstream os;
      os << "compute_budget overflows for d=" << d << " max_mode=" << max_mode
         << " rank=" << rank << " sweeps=" << sweeps;
      throw OverflowError(os.str());
    }
  }
  return m;
}

SweepState::SweepState(TensorShape shape, const TtOptConfig& config)
    : shape_(std::move(shape)), config_(config), start_(std::chrono::steady_clock::now()) {
  shape_.validate();
  if (config_.rank == 0) throw InputError("rank must be >= 1");
  if (config_.budget == 0) throw InputError("budget must be >= 1");
  const std::size_t d = shape_.dims();

  const std::size_t one_sweep =
      compute_budget(d, static_cast<std::size_t>(shape_.max_mode()), config_.rank, 1);
  if (config_.budget < one_sweep)
    spdlog::warn("budget {} is below one full sweep ({} calls for d={}, rank={})",
                 config_.budget, one_sweep, d, config_.rank);

  prefixes_.assign(d + 1, {});
  prefixes_[0] = {IndexLink{}};
  suffixes_ = random_suffix_links(shape_, config_.rank, config_.seed);

  prefix_gen_.assign(d + 1, 0);
  prefix_parent_gen_.assign(d + 1, 0);
  suffix_gen_.assign(d + 1, 0);
  suffix_parent_gen_.assign(d + 1, 0);
  prefix_gen_[0] = next_gen_++;
  for (std::size_t k = d + 1; k-- > 1;) {
    suffix_gen_[k] = next_gen_++;
    if (k < d) suffix_parent_gen_[k] = suffix_gen_[k + 1];
  }
}

PartialIndexSet SweepState::prefix_set(std::size_t k) const {
  if (k > shape_.dims()) throw InputError("prefix level out of range");
  if (k > 0 && (prefix_gen_[k] == 0 || prefix_parent_gen_[k] != prefix_gen_[k - 1]))
    throw std::logic_error("prefix level is stale or not built yet");
  return materialize_prefix(prefixes_, k);
}

PartialIndexSet SweepState::suffix_set(std::size_t k) const {
  const std::size_t d = shape_.dims();
  if (k > d) throw InputError("suffix level out of range");
  if (k < d && (suffix_gen_[k] == 0 || suffix_parent_gen_[k] != suffix_gen_[k + 1]))
    throw std::logic_error("suffix level is stale or not built yet");
  return materialize_suffix(suffixes_, k);
}

void SweepState::confirm_best(const Objective& objective) {
  if (!has_best() || best_confirmed_) return;
  if (remaining_budget() == 0) throw std::logic_error("no budget left to confirm the best value");
  ++evaluations_;
  const double exact = objective(best_index_);
  if (!std::isfinite(exact)) throw NonFiniteValueError(best_index_, exact);
  best_value_ = exact;
  if (!trace_.records.empty()) trace_.records.back().best_value = exact;
  best_confirmed_ = true;
}

double SweepState::y_min() const {
  if (config_.initial_y_min) {
    return has_best() ? std::min(*config_.initial_y_min, best_value_) : *config_.initial_y_min;
  }
  return has_best() ? best_value_ : 0.0;
}

void sweep_step(SweepState& state, std::size_t position, Direction direction,
                const Objective& objective) {
  const TensorShape& shape = state.shape_;
  const std::size_t d = shape.dims();
  if (position >= d) throw InputError("sweep position out of range");
  if (state.terminal_) return;
  const int mode_size = shape.mode_sizes[position];
  const bool forward = direction == Direction::kForward;

  const PartialIndexSet rows = forward ? expand_rows(state.prefix_set(position), mode_size)
                                       : state.prefix_set(position);
  const PartialIndexSet cols = forward ? state.suffix_set(position + 1)
                                       : expand_cols(state.suffix_set(position + 1), mode_size);

  // Inexact objectives keep one call back for the final confirmation.
  const bool exact_block = objective.block_exact();
  const std::size_t reserve = !exact_block && state.config_.budget > 1 ? 1 : 0;
  const std::size_t available =
      state.remaining_budget() > reserve ? state.remaining_budget() - reserve : 0;
  const std::size_t grid = rows.size() * cols.size();
  const std::size_t n = std::min(grid, available);
  if (n == 0) {
    state.terminal_ = true;
    return;
  }

  std::vector<double> values(n);
  const bool single_call = !exact_block && n == 1;
  if (single_call)
    values[0] = objective(join(rows[0], cols[0]));
  else
    objective.evaluate_block(rows, cols, values, state.config_.threads);
  const std::size_t evals_before = state.evaluations_;
  state.evaluations_ += n;

  std::size_t arg = 0;
  for (std::size_t q = 0; q < n; ++q) {
    if (!std::isfinite(values[q]))
      throw NonFiniteValueError(join(rows[q / cols.size()], cols[q % cols.size()]), values[q]);
    if (values[q] < values[arg]) arg = q;
  }
  MultiIndex candidate = join(rows[arg / cols.size()], cols[arg % cols.size()]);
  const double block_value = values[arg];
  const auto elapsed = [&state] {
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - state.start_;
    return dt.count();
  };
  const auto accept = [&](double value, bool confirmed) {
    state.best_value_ = value;
    state.best_index_ = std::move(candidate);
    state.best_confirmed_ = confirmed;
    state.trace_.records.push_back({evals_before + arg + 1, value, elapsed()});
  };
  if (exact_block || single_call) {
    if (!state.has_best() || block_value < state.best_value_) accept(block_value, true);
  } else if (!state.has_best()) {
    accept(block_value, false);
  } else {
    // Clear improvements are taken at the block value; near ties are
    // settled with exact evaluations when the budget allows.
    const double slack = kConfirmSlack * (1.0 + std::abs(state.best_value_));
    const std::size_t cost = state.best_confirmed_ ? 1 : 2;
    if (block_value < state.best_value_ - slack) {
      accept(block_value, false);
    } else if (block_value <= state.best_value_ + slack && candidate != state.best_index_ &&
               state.remaining_budget() >= cost + reserve) {
      state.confirm_best(objective);
      ++state.evaluations_;
      const double exact = objective(candidate);
      if (!std::isfinite(exact)) throw NonFiniteValueError(std::move(candidate), exact);
      if (exact < state.best_value_) accept(exact, true);
    }
  }

  if (n < grid) {
    state.terminal_ = true;
    return;
  }

  // Candidates along the rows of the maxvol input: expanded rows going
  // forward, expanded columns going backward.
  const std::size_t num_candidates = forward ? rows.size() : cols.size();
  const std::size_t num_other = forward ? cols.size() : rows.size();
  linalg::DenseMatrix raw(num_candidates, num_other);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const double v = values[i * cols.size() + j];
      if (forward)
        raw(i, j) = v;
      else
        raw(j, i) = v;
    }
  }
  const double y_min = state.y_min();
  linalg::DenseMatrix mapped = map_values(raw, y_min);

  std::vector<std::size_t> selected;
  bool fallback = false;
  if (num_candidates <= num_other) {
    selected.resize(num_candidates);
    for (std::size_t i = 0; i < num_candidates; ++i) selected[i] = i;
  } else {
    try {
      selected = linalg::maxvol(mapped, state.config_.maxvol_tau, state.config_.maxvol_max_iters)
                     .row_indices;
    } catch (const RankDeficientError& e) {
      spdlog::debug("maxvol at position {} failed ({}); using filled LU pivots", position,
                    e.what());
      selected = linalg::lu_pivot_rows_filled(mapped);
      fallback = true;
    }
  }

  std::vector<IndexLink> level;
  level.reserve(selected.size());
  for (std::size_t s : selected) {
    const auto [parent, value] = split_flat_row(s, mode_size, num_candidates / mode_size);
    level.push_back({parent, value});
  }
  if (forward) {
    state.prefixes_[position + 1] = std::move(level);
    state.prefix_gen_[position + 1] = state.next_gen_++;
    state.prefix_parent_gen_[position + 1] = state.prefix_gen_[position];
  } else {
    state.suffixes_[position] = std::move(level);
    state.suffix_gen_[position] = state.next_gen_++;
    state.suffix_parent_gen_[position] = state.suffix_gen_[position + 1];
  }

  if (state.config_.on_step) {
    StepRecord record;
    record.position = position;
    record.direction = direction;
    record.evaluations = n;
    record.raw = std::move(raw);
    record.mapped = std::move(mapped);
    record.y_min = y_min;
    record.selected = std::move(selected);
    record.used_fallback = fallback;
    state.config_.on_step(record);
  }
}

OptResult optimize(const Objective& objective, const TtOptConfig& config) {
  SweepState state(objective.shape(), config);
  const std::size_t d = state.shape().dims();
  std::size_t sweeps = 0;
  while (!state.terminal()) {
    for (std::size_t k = 0; k < d && !state.terminal(); ++k)
      sweep_step(state, k, Direction::kForward, objective);
    for (std::size_t k = d; k-- > 0 && !state.terminal();)
      sweep_step(state, k, Direction::kBackward, objective);
    if (!state.terminal()) ++sweeps;
  }
  state.confirm_best(objective);
  spdlog::debug("ttopt: {} evaluations, {} full sweeps, best {}", state.evaluations_used(),
                sweeps, state.best_value());
  return OptResult{state.best_index_, state.best_value_, state.evaluations_, sweeps,
                   std::move(state.trace_)};
}

}  // namespace ttqubo::ttopt
