#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ttqubo/baselines.hpp"
#include "ttqubo/qubo.hpp"
#include "ttqubo/synthetic.hpp"
#include "ttqubo/ttopt.hpp"

namespace ttqubo::cli {

/// Exit codes of the ttqubo tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Bad flag value or combination.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// A solver's reported value does not match evaluate() on its solution.
class VerificationError : public Error {
 public:
  using Error::Error;
};

enum class SolverKind : std::uint8_t { kTtopt, kSa, kExhaustive, kRandom };

/// Parses ttopt|sa|exhaustive|random; throws UsageError otherwise.
SolverKind parse_solver(const std::string& name);
std::string to_string(SolverKind kind);

struct SolveOptions {
  SolverKind solver = SolverKind::kTtopt;
  std::size_t rank = 4;
  /// Unset: one sweep of the 2 d N R^2 heuristic (ttopt), or the same count
  /// of steps/samples for sa and random.
  std::optional<std::size_t> budget;
  std::uint64_t seed = 0;
  double tau = linalg::kDefaultMaxvolTau;
};

struct RunReport {
  std::string solver;
  qubo::BinaryVector x;
  double best_value = 0.0;
  std::size_t selected_count = 0;
  double selected_fraction = 0.0;
  std::size_t evaluations = 0;
  double seconds = 0.0;
  std::uint64_t seed = 0;
  /// Echo of the configuration and problem provenance, in insertion order.
  std::vector<std::pair<std::string, std::string>> config;
  /// Improvement history; empty for solvers without one.
  ttopt::Trace trace;
  bool has_trace = false;
};

/// Budget used when SolveOptions::budget is unset.
std::size_t default_budget(std::size_t size, std::size_t rank);

/// Runs one solver and re-verifies the result with evaluate(); throws
/// VerificationError on a mismatch.
RunReport run_solver(const qubo::QuboProblem& q, const SolveOptions& options);

/// Flat `key=value` lines.
void write_report(std::ostream& os, const RunReport& report);
/// Aligned human-readable summary.
void print_report(std::ostream& os, const RunReport& report);
/// The solution as one line of 0/1 characters.
void write_solution(std::ostream& os, const qubo::BinaryVector& x);
qubo::BinaryVector read_solution(std::istream& is, const std::string& source);

/// One problem of a benchmark: a file or a synthetic instance.
struct BenchProblem {
  std::string name;
  std::optional<std::string> path;
  std::optional<qubo::SyntheticSpec> synthetic;
};

struct BenchSolver {
  std::string name;
  SolveOptions options;
};

struct BenchSpec {
  std::vector<BenchProblem> problems;
  std::vector<BenchSolver> solvers;
  std::vector<std::uint64_t> seeds{0};
};

/// Reads the JSON benchmark description (see README). Throws ParseError.
BenchSpec read_bench_spec(std::istream& is, const std::string& source);

struct BenchCell {
  std::string problem;
  std::string solver;
  std::uint64_t seed = 0;
  RunReport report;
  /// |value - best| / |best| (plain difference when best is 0), where best is
  /// the lowest value of any cell on the same problem.
  double relative_error = 0.0;
};

struct BenchOutcome {
  std::vector<BenchCell> cells;
};

/// Runs every (problem, solver, seed) cell on up to `jobs` worker threads and
/// writes results.csv, problems.txt, per-cell trace CSVs and the panel CSVs
/// (value, relative error, time against evaluations) into `out_dir`.
BenchOutcome run_bench(const BenchSpec& spec, const std::string& out_dir, unsigned jobs);

/// Full command line: `ttqubo <solve|build|bench|gen|eval> ...`. Returns the
/// exit code; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ttqubo::cli
