#include "safeaa/bench.hpp"

#include <CLI11.hpp>

#include <fnmatch.h>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace safeaa;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// A directory yields every *.json inside it; otherwise the argument is a
// glob over file names in its parent directory.
std::vector<fs::path> resolve_problem_paths(const std::string& arg) {
  std::vector<fs::path> out;
  fs::path p(arg);
  if (fs::is_directory(p)) {
    for (const auto& e : fs::directory_iterator(p)) {
      if (e.is_regular_file() && e.path().extension() == ".json") out.push_back(e.path());
    }
  } else if (fs::is_regular_file(p)) {
    out.push_back(p);
  } else {
    fs::path dir = p.has_parent_path() ? p.parent_path() : fs::path(".");
    const std::string pattern = p.filename().string();
    if (fs::is_directory(dir)) {
      for (const auto& e : fs::directory_iterator(dir)) {
        if (e.is_regular_file() && fnmatch(pattern.c_str(), e.path().filename().c_str(), 0) == 0) {
          out.push_back(e.path());
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Safeguarded Anderson acceleration benchmark"};
  app.require_subcommand(1);

  // bench run
  auto* run = app.add_subcommand("run", "Run a configuration matrix over a problem set");
  std::string problems_arg;
  std::string generate_arg;
  std::string configs_arg = "vanilla,unsafe,safeguarded";
  std::string variant = "type2";
  std::string out_dir = "bench_out";
  bench::BenchSettings settings;
  DriverConfig& dc = settings.solve.driver;
  double gamma = settings.solve.gamma;
  bool no_adapt = false;
  auto* probs_opt = run->add_option("--problems", problems_arg, "Problem directory, file or glob");
  auto* gen_opt = run->add_option("--generate", generate_arg, "Generator specs kind:AxB:seed[,...]");
  probs_opt->excludes(gen_opt);
  run->add_option("--configs", configs_arg, "Comma separated list of vanilla, unsafe, safeguarded");
  run->add_option("--eps", dc.eps, "Residual tolerance")->capture_default_str();
  run->add_option("--tau", dc.tau, "Safeguard factor")->capture_default_str();
  run->add_option("--eta-max", dc.eta_max, "Bound on ||eta||")->capture_default_str();
  run->add_option("--mmax", dc.m_max, "Memory size")->capture_default_str();
  run->add_option("--check-interval", dc.check_interval, "Iterations between termination checks")
      ->capture_default_str();
  run->add_option("--adapt-interval", dc.adapt_interval, "Iterations between step-size updates (0 = off)")
      ->capture_default_str();
  run->add_option("--max-iter", dc.max_iter, "Iteration limit")->capture_default_str();
  run->add_option("--time-cap", settings.time_cap, "Per-run wall-clock cap in seconds")->capture_default_str();
  run->add_option("--gamma", gamma, "Initial DRS step size")->capture_default_str();
  run->add_flag("--no-adapt", no_adapt, "Keep gamma fixed");
  run->add_option("--out-dir", out_dir, "Output directory")->capture_default_str();
  run->add_option("--variant", variant, "type2 or type1")->check(CLI::IsMember({"type1", "type2"}));
  run->add_option("--threads", settings.threads, "Parallel solves")->check(CLI::PositiveNumber);

  // bench gen
  auto* gen = app.add_subcommand("gen", "Write a generated problem to JSON");
  std::string kind;
  std::uint64_t seed = 1;
  std::string size;
  std::string out_file;
  gen->add_option("--kind", kind, "random_qp, portfolio, lasso, random_sdp, infeasible_lp, unbounded_lp")
      ->required();
  gen->add_option("--seed", seed, "Generator seed")->capture_default_str();
  gen->add_option("--size", size, "Size parameters, e.g. 50x100 (kind dependent)");
  gen->add_option("--out", out_file, "Output file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      bench::GenerateRequest req;
      req.kind = bench::parse_kind(kind);
      req.seed = seed;
      for (const auto& part : split(size, 'x')) req.sizes.push_back(std::stoll(part));
      bench::save_problem(bench::generate(req), out_file);
      std::cout << "wrote " << out_file << '\n';
      return 0;
    }

    if (problems_arg.empty() && generate_arg.empty()) {
      std::cerr << "run: one of --problems or --generate is required\n";
      return 2;
    }
    dc.variant = variant == "type1" ? AccelVariant::TypeI : AccelVariant::TypeII;
    settings.solve.gamma = gamma;
    settings.solve.adapt_gamma = !no_adapt;
    if (no_adapt) dc.adapt_interval = 0;
    dc.validate();

    std::vector<bench::NamedProblem> problems;
    if (!problems_arg.empty()) {
      for (const auto& path : resolve_problem_paths(problems_arg)) {
        problems.push_back({path.stem().string(), bench::load_problem(path)});
      }
    } else {
      for (const auto& spec : split(generate_arg, ',')) {
        for (const auto& req : bench::parse_generate_spec(spec)) {
          problems.push_back({req.name(), bench::generate(req)});
        }
      }
    }
    if (problems.empty()) {
      std::cerr << "run: no problems found\n";
      return 2;
    }
    std::vector<bench::SolverConfig> configs;
    for (const auto& c : split(configs_arg, ',')) configs.push_back(bench::parse_config(c));

    const auto summary = bench::run_benchmark(problems, configs, settings);
    bench::write_outputs(summary, out_dir);
    bench::write_config_csv(summary, std::cout);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
