#include "safeaa/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <mutex>
#include <numeric>
#include <thread>

namespace safeaa::bench {

namespace {

double mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

// Empty cell for values that were not computed in this iteration.
std::string cell(double v) {
  if (std::isnan(v)) return "";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

// Quoted when it contains separators.
std::string csv_text(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

}  // namespace

const char* to_string(SolverConfig config) {
  switch (config) {
    case SolverConfig::Vanilla: return "vanilla";
    case SolverConfig::Unsafe: return "unsafe";
    case SolverConfig::Safeguarded: return "safeguarded";
  }
  return "unknown";
}

SolverConfig parse_config(const std::string& name) {
  for (auto c : {SolverConfig::Vanilla, SolverConfig::Unsafe, SolverConfig::Safeguarded}) {
    if (name == to_string(c)) return c;
  }
  throw std::invalid_argument("unknown configuration '" + name + "'");
}

conic::SolveSettings settings_for(SolverConfig config, conic::SolveSettings base) {
  switch (config) {
    case SolverConfig::Vanilla:
      base.driver.accelerate = false;
      break;
    case SolverConfig::Unsafe:
      base.driver.accelerate = true;
      base.driver.safeguard_mode = SafeguardMode::Off;
      break;
    case SolverConfig::Safeguarded:
      base.driver.accelerate = true;
      if (base.driver.safeguard_mode == SafeguardMode::Off) base.driver.safeguard_mode = SafeguardMode::Relaxed;
      break;
  }
  return base;
}

RunResult run_single(const NamedProblem& problem, SolverConfig config, const BenchSettings& settings) {
  RunResult out;
  out.problem = problem.name;
  out.config = config;
  conic::SolveSettings s = settings_for(config, settings.solve);
  s.driver.time_limit = settings.time_cap;
  try {
    conic::SolveResult res = conic::solve(problem.problem, s);
    out.status = res.record.status;
    out.iterations = res.record.iterations;
    out.solve_seconds = res.record.total_seconds;
    out.accel_seconds = res.record.accel_seconds;
    out.operator_evaluations = res.record.operator_evaluations;
    out.rejected = res.record.rejected;
    out.objective = res.objective;
    out.r_prim = res.residuals.r_prim;
    out.r_dual = res.residuals.r_dual;
    out.record = std::move(res.record);
    if (!settings.keep_traces) out.record.trace.clear();
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

BenchSummary run_benchmark(const std::vector<NamedProblem>& problems,
                           const std::vector<SolverConfig>& configs, const BenchSettings& settings) {
  if (problems.empty() || configs.empty()) {
    throw std::invalid_argument("run_benchmark: need at least one problem and one configuration");
  }
  BenchSummary summary;
  const std::size_t total = problems.size() * configs.size();
  summary.runs.resize(total);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      summary.runs[i] = run_single(problems[i / configs.size()], configs[i % configs.size()], settings);
    }
  };
  const int threads = std::max(1, settings.threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  summary.configs = summarize(summary.runs, configs, settings.time_cap, settings.gmean_shift);
  return summary;
}

std::vector<ConfigSummary> summarize(const std::vector<RunResult>& runs,
                                     const std::vector<SolverConfig>& configs, double time_cap,
                                     double shift) {
  std::vector<std::string> problems;
  for (const auto& r : runs) {
    if (std::find(problems.begin(), problems.end(), r.problem) == problems.end()) problems.push_back(r.problem);
  }
  auto find = [&](const std::string& p, SolverConfig c) -> const RunResult* {
    for (const auto& r : runs)
      if (r.problem == p && r.config == c) return &r;
    return nullptr;
  };

  std::vector<std::string> common;
  for (const auto& p : problems) {
    bool all = true;
    for (auto c : configs) {
      const RunResult* r = find(p, c);
      all = all && r != nullptr && r->solved();
    }
    if (all) common.push_back(p);
  }

  std::vector<ConfigSummary> out;
  for (auto c : configs) {
    ConfigSummary s;
    s.config = c;
    s.common = static_cast<int>(common.size());
    std::vector<double> iters;
    std::vector<double> secs;
    std::vector<double> capped;
    double accel = 0.0;
    double total = 0.0;
    for (const auto& p : problems) {
      const RunResult* r = find(p, c);
      if (r == nullptr) continue;
      if (r->solved()) ++s.solved;
      s.rejected += r->rejected;
      capped.push_back(r->solved() ? std::min(r->solve_seconds, time_cap) : time_cap);
      accel += r->accel_seconds;
      total += r->solve_seconds;
    }
    for (const auto& p : common) {
      const RunResult* r = find(p, c);
      iters.push_back(static_cast<double>(r->iterations));
      secs.push_back(r->solve_seconds);
    }
    s.mean_iterations = mean(iters);
    s.median_iterations = median(iters);
    s.mean_seconds = mean(secs);
    s.median_seconds = median(secs);
    s.gmean_seconds = capped.empty() ? 0.0 : shifted_gmean(capped, shift);
    s.accel_fraction = total > 0.0 ? accel / total : 0.0;
    out.push_back(s);
  }
  return out;
}

void write_trace_csv(const RunRecord& record, std::ostream& out) {
  out << "iter,r_fixed_point,r_prim,r_dual,accepted,j,epoch,cum_operator_evals\n";
  for (const auto& e : record.trace) {
    out << e.k << ',' << cell(e.r_norm) << ',' << cell(e.r_prim) << ',' << cell(e.r_dual) << ','
        << (e.accepted ? 1 : 0) << ',' << e.j << ',' << e.epoch << ',' << e.evaluations << '\n';
  }
}

void write_summary_csv(const BenchSummary& summary, std::ostream& out) {
  out << "problem,config,status,iterations,solve_seconds,accel_seconds,operator_evals,rejected,"
         "objective,r_prim,r_dual,error\n";
  for (const auto& r : summary.runs) {
    out << r.problem << ',' << to_string(r.config) << ','
        << (r.error.empty() ? to_string(r.status) : "error") << ',' << r.iterations << ','
        << cell(r.solve_seconds) << ',' << cell(r.accel_seconds) << ',' << r.operator_evaluations
        << ',' << r.rejected << ',' << cell(r.objective) << ',' << cell(r.r_prim) << ','
        << cell(r.r_dual) << ',' << csv_text(r.error) << '\n';
  }
}

void write_config_csv(const BenchSummary& summary, std::ostream& out) {
  out << "config,solved,common,mean_iterations,median_iterations,mean_seconds,median_seconds,"
         "shifted_gmean_seconds,accel_fraction,rejected\n";
  for (const auto& s : summary.configs) {
    out << to_string(s.config) << ',' << s.solved << ',' << s.common << ',' << cell(s.mean_iterations)
        << ',' << cell(s.median_iterations) << ',' << cell(s.mean_seconds) << ','
        << cell(s.median_seconds) << ',' << cell(s.gmean_seconds) << ',' << cell(s.accel_fraction)
        << ',' << s.rejected << '\n';
  }
}

void write_outputs(const BenchSummary& summary, const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir / "traces");
  for (const auto& r : summary.runs) {
    std::ofstream trace(out_dir / "traces" / (r.problem + "__" + to_string(r.config) + ".csv"));
    write_trace_csv(r.record, trace);
  }
  std::ofstream s(out_dir / "summary.csv");
  write_summary_csv(summary, s);
  std::ofstream c(out_dir / "configs.csv");
  write_config_csv(summary, c);
}

}  // namespace safeaa::bench
