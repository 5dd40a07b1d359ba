#include "ttqubo/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "ttqubo/errors.hpp"
#include "ttqubo/qubo_io.hpp"

namespace ttqubo::cli {

namespace fs = std::filesystem;
using qubo::format_double;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
  return dt.count();
}

std::string fraction_text(double f) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << 100.0 * f << "%";
  return os.str();
}

// Writes through a temporary file so readers never see a partial file.
template <class Fn>
void write_atomically(const fs::path& path, Fn&& fill) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw Error("cannot write " + tmp.string());
    fill(out);
    out.flush();
    if (!out) throw Error("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string sanitize(const std::string& name) {
  std::string s = name;
  for (char& c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '.') c = '_';
  return s;
}

}  // namespace

SolverKind parse_solver(const std::string& name) {
  if (name == "ttopt") return SolverKind::kTtopt;
  if (name == "sa") return SolverKind::kSa;
  if (name == "exhaustive") return SolverKind::kExhaustive;
  if (name == "random") return SolverKind::kRandom;
  throw UsageError("unknown solver '" + name + "' (ttopt|sa|exhaustive|random)");
}

std::string to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::kTtopt: return "ttopt";
    case SolverKind::kSa: return "sa";
    case SolverKind::kExhaustive: return "exhaustive";
    case SolverKind::kRandom: return "random";
  }
  return "?";
}

std::size_t default_budget(std::size_t size, std::size_t rank) {
  return ttopt::compute_budget(size, 2, rank, 1);
}

RunReport run_solver(const qubo::QuboProblem& q, const SolveOptions& options) {
  if (q.size() == 0) throw InputError("QUBO problem has no variables");
  if (options.rank == 0) throw UsageError("--rank must be >= 1");
  if (options.budget && *options.budget == 0) throw UsageError("--budget must be >= 1");
  if (!(options.tau >= 0.0)) throw UsageError("--tau must be >= 0");

  RunReport report;
  report.solver = to_string(options.solver);
  report.seed = options.seed;
  const std::size_t budget = options.budget.value_or(default_budget(q.size(), options.rank));
  const auto start = std::chrono::steady_clock::now();

  switch (options.solver) {
    case SolverKind::kTtopt: {
      qubo::QuboObjective objective(q);
      ttopt::TtOptConfig config;
      config.rank = options.rank;
      config.budget = budget;
      config.seed = options.seed;
      config.maxvol_tau = options.tau;
      ttopt::OptResult r = ttopt::optimize(objective, config);
      report.x.assign(r.best_index.begin(), r.best_index.end());
      report.best_value = r.best_value;
      report.evaluations = r.evaluations_used;
      report.trace = std::move(r.trace);
      report.has_trace = true;
      report.config = {{"rank", std::to_string(options.rank)},
                       {"budget", std::to_string(budget)},
                       {"tau", format_double(options.tau)},
                       {"sweeps_completed", std::to_string(r.sweeps_completed)}};
      break;
    }
    case SolverKind::kSa: {
      const auto schedule = baselines::SaSchedule::defaults(q, budget, options.seed);
      auto r = baselines::simulated_annealing(q, schedule);
      report.x = std::move(r.x);
      report.best_value = r.value;
      report.evaluations = r.evaluations;
      report.config = {{"budget", std::to_string(budget)},
                       {"initial_temperature", format_double(schedule.initial_temperature)},
                       {"final_temperature", format_double(schedule.final_temperature)}};
      break;
    }
    case SolverKind::kExhaustive: {
      auto r = baselines::exhaustive(q);
      report.x = std::move(r.x);
      report.best_value = r.value;
      report.evaluations = r.evaluations;
      break;
    }
    case SolverKind::kRandom: {
      auto r = baselines::random_search(q, budget, options.seed);
      report.x = std::move(r.x);
      report.best_value = r.value;
      report.evaluations = r.evaluations;
      report.config = {{"budget", std::to_string(budget)}};
      break;
    }
  }
  report.seconds = seconds_since(start);

  const double check = qubo::evaluate(q, report.x);
  if (check != report.best_value) {
    std::ostringstream os;
    os << report.solver << " reported " << format_double(report.best_value)
       << " but evaluate() gives " << format_double(check);
    throw VerificationError(os.str());
  }
  report.selected_count =
      static_cast<std::size_t>(std::count(report.x.begin(), report.x.end(), std::uint8_t{1}));
  report.selected_fraction = qubo::selected_fraction(report.x);
  return report;
}

void write_report(std::ostream& os, const RunReport& r) {
  os << "solver=" << r.solver << "\n"
     << "best_value=" << format_double(r.best_value) << "\n"
     << "selected_count=" << r.selected_count << "\n"
     << "selected_fraction=" << format_double(r.selected_fraction) << "\n"
     << "size=" << r.x.size() << "\n"
     << "evaluations=" << r.evaluations << "\n"
     << "seconds=" << format_double(r.seconds) << "\n"
     << "seed=" << r.seed << "\n";
  for (const auto& [k, v] : r.config) os << k << "=" << v << "\n";
}

void print_report(std::ostream& os, const RunReport& r) {
  const auto line = [&os](const std::string& key, const std::string& value) {
    os << std::left << std::setw(18) << key << value << "\n";
  };
  line("solver", r.solver);
  line("best value", format_double(r.best_value));
  line("selected", std::to_string(r.selected_count) + "/" + std::to_string(r.x.size()) + " (" +
                       fraction_text(r.selected_fraction) + ")");
  line("evaluations", std::to_string(r.evaluations));
  std::ostringstream secs;
  secs << std::fixed << std::setprecision(3) << r.seconds;
  line("seconds", secs.str());
  line("seed", std::to_string(r.seed));
  for (const auto& [k, v] : r.config) line(k, v);
}

void write_solution(std::ostream& os, const qubo::BinaryVector& x) {
  for (std::uint8_t b : x) os << (b ? '1' : '0');
  os << "\n";
}

qubo::BinaryVector read_solution(std::istream& is, const std::string& source) {
  qubo::BinaryVector x;
  std::string line;
  std::size_t number = 0;
  while (std::getline(is, line)) {
    ++number;
    for (char c : line) {
      if (c == '0' || c == '1')
        x.push_back(static_cast<std::uint8_t>(c - '0'));
      else if (!std::isspace(static_cast<unsigned char>(c)) && c != ',')
        throw ParseError(source, number, std::string("unexpected character '") + c + "'");
    }
  }
  if (x.empty()) throw ParseError(source, 0, "solution file holds no 0/1 entries");
  return x;
}

BenchSpec read_bench_spec(std::istream& is, const std::string& source) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(is);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(source, 0, e.what());
  }
  BenchSpec spec;
  try {
    for (const auto& p : j.at("problems")) {
      BenchProblem bp;
      bp.name = p.at("name").get<std::string>();
      if (p.contains("path")) bp.path = p.at("path").get<std::string>();
      if (p.contains("synthetic")) {
        const auto& s = p.at("synthetic");
        qubo::SyntheticSpec syn;
        syn.size = s.at("size").get<std::size_t>();
        syn.density = s.value("density", 1.0);
        syn.distribution = qubo::parse_distribution(s.value("distribution", std::string("uniform")));
        syn.seed = s.value("seed", std::uint64_t{0});
        if (s.contains("strength") || s.contains("fraction"))
          syn.constraint = qubo::ConstraintSpec{s.value("strength", 0.0), s.value("fraction", 0.0)};
        syn.validate();
        bp.synthetic = syn;
      }
      if (bp.path.has_value() == bp.synthetic.has_value())
        throw ParseError(source, 0, "problem '" + bp.name + "' needs exactly one of path, synthetic");
      spec.problems.push_back(std::move(bp));
    }
    for (const auto& s : j.at("solvers")) {
      BenchSolver bs;
      const std::string kind = s.at("solver").get<std::string>();
      bs.options.solver = parse_solver(kind);
      bs.name = s.value("name", kind);
      bs.options.rank = s.value("rank", std::size_t{4});
      if (s.contains("budget")) bs.options.budget = s.at("budget").get<std::size_t>();
      bs.options.tau = s.value("tau", linalg::kDefaultMaxvolTau);
      spec.solvers.push_back(std::move(bs));
    }
    if (j.contains("seeds")) spec.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(source, 0, e.what());
  } catch (const InputError& e) {
    throw ParseError(source, 0, e.what());
  }
  if (spec.problems.empty() || spec.solvers.empty() || spec.seeds.empty())
    throw ParseError(source, 0, "bench spec needs problems, solvers and seeds");
  return spec;
}

BenchOutcome run_bench(const BenchSpec& spec, const std::string& out_dir, unsigned jobs) {
  if (jobs == 0) throw UsageError("--jobs must be >= 1");
  fs::create_directories(fs::path(out_dir) / "traces");

  std::vector<qubo::QuboProblem> problems;
  problems.reserve(spec.problems.size());
  for (const auto& p : spec.problems)
    problems.push_back(p.path ? qubo::load_qubo(*p.path) : qubo::generate_synthetic(*p.synthetic));

  BenchOutcome outcome;
  for (const auto& p : spec.problems)
    for (const auto& s : spec.solvers)
      for (std::uint64_t seed : spec.seeds) outcome.cells.push_back({p.name, s.name, seed, {}, 0.0});

  const std::size_t per_problem = spec.solvers.size() * spec.seeds.size();
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  const auto worker = [&] {
    for (std::size_t c = next++; c < outcome.cells.size(); c = next++) {
      try {
        const std::size_t pi = c / per_problem;
        const std::size_t si = (c % per_problem) / spec.seeds.size();
        BenchCell& cell = outcome.cells[c];
        SolveOptions options = spec.solvers[si].options;
        options.seed = cell.seed;
        cell.report = run_solver(problems[pi], options);
        spdlog::info("bench {} / {} / seed {}: {} in {:.3f} s", cell.problem, cell.solver,
                     cell.seed, cell.report.best_value, cell.report.seconds);
        if (cell.report.has_trace) {
          const fs::path path = fs::path(out_dir) / "traces" /
                                (sanitize(cell.problem) + "__" + sanitize(cell.solver) + "__seed" +
                                 std::to_string(cell.seed) + ".csv");
          write_atomically(path, [&](std::ostream& os) { cell.report.trace.write_csv(os); });
        }
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const std::size_t n = std::min<std::size_t>(jobs, outcome.cells.size());
    for (std::size_t w = 1; w < n; ++w) pool.emplace_back(worker);
    worker();
  }
  if (error) std::rethrow_exception(error);

  std::map<std::string, double> best;
  for (const auto& cell : outcome.cells) {
    auto [it, inserted] = best.emplace(cell.problem, cell.report.best_value);
    if (!inserted) it->second = std::min(it->second, cell.report.best_value);
  }
  const auto rel = [&best](const std::string& problem, double v) {
    const double b = best.at(problem);
    return b == 0.0 ? std::abs(v - b) : std::abs(v - b) / std::abs(b);
  };
  for (auto& cell : outcome.cells) cell.relative_error = rel(cell.problem, cell.report.best_value);

  const fs::path dir(out_dir);
  write_atomically(dir / "results.csv", [&](std::ostream& os) {
    os << "problem,solver,seed,value,relative_error_vs_batch_best,evaluations,seconds,"
          "selected_fraction\n";
    for (const auto& c : outcome.cells)
      os << c.problem << "," << c.solver << "," << c.seed << "," << format_double(c.report.best_value)
         << "," << format_double(c.relative_error) << "," << c.report.evaluations << ","
         << format_double(c.report.seconds) << "," << format_double(c.report.selected_fraction)
         << "\n";
  });
  write_atomically(dir / "problems.txt", [&](std::ostream& os) {
    for (std::size_t i = 0; i < spec.problems.size(); ++i) {
      const auto& p = spec.problems[i];
      os << "[" << p.name << "]\n" << "size=" << problems[i].size() << "\n";
      if (p.path) os << "path=" << *p.path << "\n";
      if (p.synthetic) {
        const auto& s = *p.synthetic;
        os << "generator=synthetic\n"
           << "density=" << format_double(s.density) << "\n"
           << "distribution=" << qubo::to_string(s.distribution) << "\n"
           << "seed=" << s.seed << "\n";
        if (s.constraint)
          os << "strength=" << format_double(s.constraint->strength) << "\n"
             << "fraction=" << format_double(s.constraint->target_fraction) << "\n";
      }
      os << "batch_best=" << format_double(best.at(p.name)) << "\n";
    }
  });

  // Panel data: every improvement of traced runs, final points otherwise.
  struct Point {
    std::size_t evals;
    double value;
    double seconds;
  };
  const auto points = [](const BenchCell& c) {
    std::vector<Point> pts;
    if (c.report.has_trace)
      for (const auto& r : c.report.trace.records) pts.push_back({r.evaluations, r.best_value, r.seconds});
    else
      pts.push_back({c.report.evaluations, c.report.best_value, c.report.seconds});
    return pts;
  };
  const auto panel = [&](const std::string& file, const std::string& column, auto&& field) {
    write_atomically(dir / file, [&](std::ostream& os) {
      os << "problem,solver,seed,evals," << column << "\n";
      for (const auto& c : outcome.cells)
        for (const Point& pt : points(c))
          os << c.problem << "," << c.solver << "," << c.seed << "," << pt.evals << ","
             << format_double(field(c, pt)) << "\n";
    });
  };
  panel("panel_value.csv", "best_value", [](const BenchCell&, const Point& p) { return p.value; });
  panel("panel_relative_error.csv", "relative_error_vs_batch_best",
        [&](const BenchCell& c, const Point& p) { return rel(c.problem, p.value); });
  panel("panel_time.csv", "seconds", [](const BenchCell&, const Point& p) { return p.seconds; });
  return outcome;
}

namespace {

struct SolveArgs {
  std::string problem;
  std::string solver = "ttopt";
  std::size_t rank = 4;
  std::size_t budget = 0;
  std::uint64_t seed = 0;
  double tau = linalg::kDefaultMaxvolTau;
  std::string trace;
  std::string solution;
  std::string report;
};

struct BuildArgs {
  std::string icm, scbf, scf, out;
  double beta = 0.0, strength = 0.0, fraction = 0.0, epsilon = 1e-9;
};

struct BenchArgs {
  std::string spec;
  std::string out_dir;
  std::size_t repeats = 0;
  unsigned jobs = 1;
};

struct GenArgs {
  std::size_t size = 0;
  double density = 1.0;
  std::string distribution = "uniform";
  std::uint64_t seed = 0;
  double strength = 0.0;
  double fraction = 0.0;
  std::string out;
  std::string format = "sparse";
};

struct EvalArgs {
  std::string problem;
  std::string solution;
  double offset = 0.0;
};

int cmd_solve(const SolveArgs& a, const CLI::App& sub, std::ostream& out) {
  SolveOptions options;
  options.solver = parse_solver(a.solver);
  const bool ttopt = options.solver == SolverKind::kTtopt;
  if (!ttopt && (sub.count("--rank") || sub.count("--tau")))
    throw UsageError("--rank and --tau apply to --solver ttopt only");
  if (!ttopt && sub.count("--trace")) throw UsageError("--trace needs --solver ttopt");
  if (options.solver == SolverKind::kExhaustive && (sub.count("--budget") || sub.count("--seed")))
    throw UsageError("--solver exhaustive takes no --budget or --seed");
  options.rank = a.rank;
  if (sub.count("--budget")) options.budget = a.budget;
  options.seed = a.seed;
  options.tau = a.tau;

  const qubo::QuboProblem q = qubo::load_qubo(a.problem);
  RunReport report = run_solver(q, options);
  report.config.insert(report.config.begin(), {"problem", a.problem});

  print_report(out, report);
  if (!a.report.empty())
    write_atomically(a.report, [&](std::ostream& os) { write_report(os, report); });
  if (!a.solution.empty())
    write_atomically(a.solution, [&](std::ostream& os) { write_solution(os, report.x); });
  if (!a.trace.empty())
    write_atomically(a.trace, [&](std::ostream& os) { report.trace.write_csv(os); });
  return kExitOk;
}

int cmd_build(const BuildArgs& a, std::ostream& out) {
  const qubo::SparseBinaryMatrix icm = qubo::load_icm(a.icm);
  const qubo::SimilarityMatrix scbf = qubo::load_similarity(a.scbf);
  const qubo::SimilarityMatrix scf = qubo::load_similarity(a.scf);
  if (scbf.rows() != icm.rows() || scf.rows() != icm.rows()) {
    std::ostringstream os;
    os << "dimension mismatch: " << a.icm << " has " << icm.rows() << " items, " << a.scbf
       << " is " << scbf.rows() << "x" << scbf.cols() << ", " << a.scf << " is " << scf.rows()
       << "x" << scf.cols();
    throw InputError(os.str());
  }
  const qubo::ConstraintSpec constraint{a.strength, a.fraction};
  const auto ipm = qubo::build_ipm(scbf, scf, a.epsilon);
  const auto fpm = qubo::assemble_fpm(qubo::build_fpm(icm, ipm), a.beta);
  const qubo::QuboProblem bqm = qubo::build_bqm(fpm, constraint);
  qubo::save_qubo(a.out, bqm);

  const std::size_t f = bqm.size();
  const double density =
      static_cast<double>(bqm.upper_nonzeros()) / (static_cast<double>(f) * (f + 1) / 2.0);
  out << "F=" << f << "\n"
      << "density=" << format_double(density) << "\n"
      << "offset=" << format_double(qubo::bqm_offset(f, constraint)) << "\n";
  return kExitOk;
}

int cmd_bench(const BenchArgs& a, const CLI::App& sub, std::ostream& out) {
  std::ifstream in(a.spec);
  if (!in) throw ParseError(a.spec, 0, "cannot open file");
  BenchSpec spec = read_bench_spec(in, a.spec);
  const fs::path base = fs::path(a.spec).parent_path();
  for (auto& p : spec.problems)
    if (p.path && fs::path(*p.path).is_relative()) p.path = (base / *p.path).string();
  if (sub.count("--repeats")) {
    if (a.repeats == 0) throw UsageError("--repeats must be >= 1");
    spec.seeds.clear();
    for (std::size_t s = 0; s < a.repeats; ++s) spec.seeds.push_back(s);
  }
  const BenchOutcome outcome = run_bench(spec, a.out_dir, a.jobs);
  out << "cells=" << outcome.cells.size() << "\n"
      << "results=" << (fs::path(a.out_dir) / "results.csv").string() << "\n";
  return kExitOk;
}

int cmd_gen(const GenArgs& a, const CLI::App& sub, std::ostream& out) {
  qubo::SyntheticSpec spec;
  spec.size = a.size;
  spec.density = a.density;
  spec.distribution = qubo::parse_distribution(a.distribution);
  spec.seed = a.seed;
  if (sub.count("--strength") || sub.count("--fraction"))
    spec.constraint = qubo::ConstraintSpec{a.strength, a.fraction};
  const qubo::QuboProblem q = qubo::generate_synthetic(spec);
  write_atomically(a.out, [&](std::ostream& os) {
    if (a.format == "csv")
      qubo::write_qubo_csv(os, q);
    else
      qubo::write_qubo(os, q);
  });
  out << "size=" << a.size << "\n"
      << "density=" << format_double(a.density) << "\n"
      << "distribution=" << a.distribution << "\n"
      << "seed=" << a.seed << "\n";
  if (spec.constraint)
    out << "strength=" << format_double(a.strength) << "\n"
        << "fraction=" << format_double(a.fraction) << "\n"
        << "offset=" << format_double(qubo::bqm_offset(a.size, *spec.constraint)) << "\n";
  return kExitOk;
}

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  const qubo::QuboProblem q = qubo::load_qubo(a.problem);
  std::ifstream in(a.solution);
  if (!in) throw ParseError(a.solution, 0, "cannot open file");
  const qubo::BinaryVector x = read_solution(in, a.solution);
  if (x.size() != q.size()) {
    std::ostringstream os;
    os << "solution has " << x.size() << " entries, problem has " << q.size();
    throw InputError(os.str());
  }
  const double value = qubo::evaluate(q, x);
  const auto count = std::count(x.begin(), x.end(), std::uint8_t{1});
  out << std::left << std::setw(12) << "x^T BQM x" << format_double(value) << "\n";
  if (a.offset != 0.0)
    out << std::setw(12) << "with offset" << format_double(value + a.offset) << "\n";
  out << std::setw(12) << "selected" << count << "/" << x.size() << " ("
      << fraction_text(qubo::selected_fraction(x)) << ")\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"TTOpt QUBO optimizer and feature-selection BQM builder", "ttqubo"};
  app.require_subcommand(1);

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "Minimize a QUBO problem file");
  s->add_option("problem", solve.problem, "Problem file (sparse triplets or dense CSV)")->required();
  s->add_option("--solver", solve.solver, "ttopt|sa|exhaustive|random")->capture_default_str();
  s->add_option("--rank", solve.rank, "TT rank R")->check(CLI::PositiveNumber)->capture_default_str();
  s->add_option("--budget", solve.budget, "Objective evaluations M")->check(CLI::PositiveNumber);
  s->add_option("--seed", solve.seed, "Random seed")->capture_default_str();
  s->add_option("--tau", solve.tau, "Maxvol tolerance")->check(CLI::NonNegativeNumber)->capture_default_str();
  s->add_option("--trace", solve.trace, "Write the improvement trace CSV");
  s->add_option("--solution", solve.solution, "Write the solution as a 0/1 line");
  s->add_option("--report", solve.report, "Write a key=value report");

  BuildArgs build;
  auto* b = app.add_subcommand("build", "Build the BQM from ICM and similarity files");
  b->add_option("--icm", build.icm, "Item content matrix file")->required();
  b->add_option("--scbf", build.scbf, "Content-based similarity file")->required();
  b->add_option("--scf", build.scf, "Collaborative similarity file")->required();
  b->add_option("--beta", build.beta, "Penalty weight")->required();
  b->add_option("--strength", build.strength, "Constraint strength s")->required();
  b->add_option("--fraction", build.fraction, "Target fraction p")->required();
  b->add_option("--epsilon", build.epsilon, "Similarity zero threshold")->capture_default_str();
  b->add_option("--out", build.out, "Output BQM file")->required();

  BenchArgs bench;
  auto* be = app.add_subcommand("bench", "Run a JSON benchmark description");
  be->add_option("--spec", bench.spec, "Benchmark JSON")->required();
  be->add_option("--out-dir", bench.out_dir, "Output directory")->required();
  be->add_option("--repeats", bench.repeats, "Seeds 0..N-1 (overrides the spec)");
  be->add_option("--jobs", bench.jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Write a synthetic QUBO instance");
  g->add_option("--size", gen.size, "Number of variables F")->required()->check(CLI::PositiveNumber);
  g->add_option("--density", gen.density, "Upper-triangle fill in [0, 1]")->capture_default_str();
  g->add_option("--distribution", gen.distribution, "uniform|normal")->capture_default_str();
  g->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
  g->add_option("--strength", gen.strength, "Fold a cardinality constraint of this strength");
  g->add_option("--fraction", gen.fraction, "Target fraction of the constraint");
  g->add_option("--format", gen.format, "sparse|csv")
      ->check(CLI::IsMember({"sparse", "csv"}))
      ->capture_default_str();
  g->add_option("--out", gen.out, "Output file")->required();

  EvalArgs eval;
  auto* e = app.add_subcommand("eval", "Report x^T Q x and the selected share of a solution");
  e->add_option("problem", eval.problem, "Problem file")->required();
  e->add_option("--solution", eval.solution, "Solution file (0/1 line)")->required();
  e->add_option("--offset", eval.offset, "Constant added to the reported value");

  std::vector<const char*> argv{"ttqubo"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*s) return cmd_solve(solve, *s, out);
    if (*b) return cmd_build(build, out);
    if (*be) return cmd_bench(bench, *be, out);
    if (*g) return cmd_gen(gen, *g, out);
    if (*e) return cmd_eval(eval, out);
  } catch (const UsageError& ex) {
    err << "usage error: " << ex.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& ex) {
    err << "parse error: " << ex.what() << "\n";
    return kExitUsage;
  } catch (const InputError& ex) {
    err << "input error: " << ex.what() << "\n";
    return kExitUsage;
  } catch (const VerificationError& ex) {
    err << "internal error: " << ex.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace ttqubo::cli
