#pragma once

#include "safeaa/conic.hpp"
#include "safeaa/driver.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace safeaa::bench {

// ---------------------------------------------------------------------------
// Problem files

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses a JSON problem document. P is given as upper-triangle triplets
/// and A as general triplets; duplicates are summed.
conic::ConicProblem parse_problem(const std::string& text);
conic::ConicProblem load_problem(const std::filesystem::path& path);

std::string serialize_problem(const conic::ConicProblem& problem);
void save_problem(const conic::ConicProblem& problem, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Generators

enum class ProblemKind { RandomQP, Portfolio, Lasso, RandomSDP, InfeasibleLP, UnboundedLP };

const char* to_string(ProblemKind kind);
ProblemKind parse_kind(const std::string& name);

struct GenerateRequest {
  ProblemKind kind = ProblemKind::RandomQP;
  // Size parameters, meaning depends on kind:
  //   random_qp n x m, portfolio assets x factors, lasso features x samples,
  //   random_sdp side x variables, infeasible_lp / unbounded_lp n.
  std::vector<Index> sizes;
  std::uint64_t seed = 1;

  std::string name() const;
};

class InvalidParams : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

conic::ConicProblem generate(const GenerateRequest& request);

/// Parses "kind:AxB:seed" or "kind:AxB:first-last" into one request per seed.
std::vector<GenerateRequest> parse_generate_spec(const std::string& spec);

// ---------------------------------------------------------------------------
// Metrics

/// (prod (t_p + sh))^(1/n) - sh, evaluated in log space.
double shifted_gmean(const std::vector<double>& times, double sh = 10.0);

// ---------------------------------------------------------------------------
// Benchmark runs

enum class SolverConfig { Vanilla, Unsafe, Safeguarded };

const char* to_string(SolverConfig config);
SolverConfig parse_config(const std::string& name);

struct NamedProblem {
  std::string name;
  conic::ConicProblem problem;
};

struct BenchSettings {
  conic::SolveSettings solve;  // driver.accelerate / safeguard_mode are overridden per config
  double time_cap = 300.0;
  double gmean_shift = 10.0;
  int threads = 1;
  bool keep_traces = true;
};

struct RunResult {
  std::string problem;
  SolverConfig config = SolverConfig::Vanilla;
  Status status = Status::MaxIterations;
  std::string error;  // non-empty if the solve threw
  std::int64_t iterations = 0;
  double solve_seconds = 0.0;
  double accel_seconds = 0.0;
  std::uint64_t operator_evaluations = 0;
  std::uint64_t rejected = 0;
  double objective = 0.0;
  double r_prim = 0.0;
  double r_dual = 0.0;
  RunRecord record;  // full trace, emptied when keep_traces is false

  bool solved() const { return status == Status::Solved && error.empty(); }
};

struct ConfigSummary {
  SolverConfig config = SolverConfig::Vanilla;
  int solved = 0;
  int common = 0;  // size of the subset solved by every configuration
  double mean_iterations = 0.0;
  double median_iterations = 0.0;
  double mean_seconds = 0.0;
  double median_seconds = 0.0;
  double gmean_seconds = 0.0;
  double accel_fraction = 0.0;
  std::uint64_t rejected = 0;
};

struct BenchSummary {
  std::vector<RunResult> runs;  // ordered by (problem, config)
  std::vector<ConfigSummary> configs;
};

conic::SolveSettings settings_for(SolverConfig config, conic::SolveSettings base);

RunResult run_single(const NamedProblem& problem, SolverConfig config, const BenchSettings& settings);

BenchSummary run_benchmark(const std::vector<NamedProblem>& problems,
                           const std::vector<SolverConfig>& configs, const BenchSettings& settings);

/// Means over the subset solved by every configuration; unsolved runs enter
/// the shifted geometric mean at the time cap.
std::vector<ConfigSummary> summarize(const std::vector<RunResult>& runs,
                                     const std::vector<SolverConfig>& configs, double time_cap,
                                     double shift);

/// Trace CSV: iter, r_fixed_point, r_prim, r_dual, accepted, j, epoch, cum_operator_evals.
void write_trace_csv(const RunRecord& record, std::ostream& out);
void write_summary_csv(const BenchSummary& summary, std::ostream& out);
void write_config_csv(const BenchSummary& summary, std::ostream& out);

/// Writes traces/<problem>__<config>.csv, summary.csv and configs.csv.
void write_outputs(const BenchSummary& summary, const std::filesystem::path& out_dir);

}  // namespace safeaa::bench
