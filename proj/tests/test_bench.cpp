#include "safeaa/bench.hpp"

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace safeaa;
using namespace safeaa::bench;
namespace fs = std::filesystem;

namespace {

const char* kTinyQp = R"({
  "n": 1, "m": 1,
  "P": [{"row": 0, "col": 0, "value": 1}],
  "q": [-2],
  "A": [{"row": 0, "col": 0, "value": 1}],
  "b": [1],
  "cones": [{"kind": "nonneg", "dim": 1}]
})";

fs::path temp_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("safeaa_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

GenerateRequest req(ProblemKind kind, std::vector<Index> sizes, std::uint64_t seed) {
  GenerateRequest r;
  r.kind = kind;
  r.sizes = std::move(sizes);
  r.seed = seed;
  return r;
}

bool same_problem(const conic::ConicProblem& a, const conic::ConicProblem& b) {
  return a.P == b.P && a.q == b.q && a.A == b.A && a.b == b.b && a.cones == b.cones;
}

}  // namespace

TEST(ShiftedGmean, UnitValues) {
  EXPECT_NEAR(shifted_gmean({0.0}, 10.0), 0.0, 1e-12);
  EXPECT_NEAR(shifted_gmean({90.0, 90.0}, 10.0), 90.0, 1e-12);
  EXPECT_NEAR(shifted_gmean({0.0, 990.0}, 10.0), 90.0, 1e-12);
  EXPECT_NEAR(shifted_gmean({0.0, 990.0}), 90.0, 1e-12);
}

TEST(ShiftedGmean, IdenticalAndMonotone) {
  for (double t : {0.0, 0.25, 3.0, 299.0}) {
    EXPECT_NEAR(shifted_gmean({t, t, t, t, t}, 10.0), t, 1e-12);
  }
  std::vector<double> times{1.0, 5.0, 20.0};
  double prev = shifted_gmean(times, 10.0);
  for (int i = 0; i < 10; ++i) {
    times[1] += 7.0;
    const double cur = shifted_gmean(times, 10.0);
    EXPECT_GE(cur, prev);
    prev = cur;
  }
}

TEST(ShiftedGmean, RejectsEmptyAndBadInput) {
  EXPECT_THROW(shifted_gmean({}, 10.0), std::invalid_argument);
  EXPECT_THROW(shifted_gmean({1.0}, 0.0), std::invalid_argument);
  EXPECT_THROW(shifted_gmean({-1.0}, 10.0), std::invalid_argument);
}

TEST(Generate, Deterministic) {
  const auto a = generate(req(ProblemKind::RandomQP, {50, 100}, 1));
  const auto b = generate(req(ProblemKind::RandomQP, {50, 100}, 1));
  EXPECT_TRUE(same_problem(a, b));
  EXPECT_EQ(serialize_problem(a), serialize_problem(b));
  const auto c = generate(req(ProblemKind::RandomQP, {50, 100}, 2));
  EXPECT_FALSE(same_problem(a, c));
}

TEST(Generate, RandomQpFeasibleByConstruction) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto p = generate(req(ProblemKind::RandomQP, {20, 40}, seed));
    EXPECT_NO_THROW(p.validate());
    conic::SolveSettings s;
    const auto res = conic::solve(p, s);
    EXPECT_EQ(res.record.status, Status::Solved);
  }
}

TEST(Generate, PortfolioHessianIsPsd) {
  const auto p = generate(req(ProblemKind::Portfolio, {100, 10}, 7));
  EXPECT_EQ(p.P, p.P.transpose());
  const double lo = Eigen::SelfAdjointEigenSolver<DenseMatrix>(p.P).eigenvalues().minCoeff();
  EXPECT_GE(lo, -1e-10);
}

TEST(Generate, AllKindsValidate) {
  for (auto kind : {ProblemKind::RandomQP, ProblemKind::Portfolio, ProblemKind::Lasso,
                    ProblemKind::RandomSDP, ProblemKind::InfeasibleLP, ProblemKind::UnboundedLP}) {
    GenerateRequest r;
    r.kind = kind;
    r.seed = 3;
    EXPECT_NO_THROW(generate(r).validate()) << to_string(kind);
    EXPECT_EQ(parse_kind(to_string(kind)), kind);
  }
}

TEST(Generate, InfeasibleLpHasContradictoryBounds) {
  const auto p = generate(req(ProblemKind::InfeasibleLP, {10}, 3));
  // Rows 0 and 1 read x_0 <= -1 and -x_0 <= -1: their sum gives 0 <= -2.
  EXPECT_EQ(p.A.row(0) + p.A.row(1), Eigen::RowVectorXd::Zero(p.n()));
  EXPECT_LT(p.b(0) + p.b(1), 0.0);
}

TEST(Generate, InvalidParams) {
  EXPECT_THROW(generate(req(ProblemKind::RandomQP, {0, 5}, 1)), InvalidParams);
  EXPECT_THROW(parse_kind("nonsense"), InvalidParams);
  EXPECT_THROW(parse_generate_spec("random_qp:50x100"), InvalidParams);
  EXPECT_THROW(parse_generate_spec("random_qp:50x100:5-2"), InvalidParams);
}

TEST(Generate, SpecParsing) {
  const auto reqs = parse_generate_spec("random_qp:50x100:3-5");
  ASSERT_EQ(reqs.size(), 3u);
  EXPECT_EQ(reqs[0].seed, 3u);
  EXPECT_EQ(reqs[2].seed, 5u);
  EXPECT_EQ(reqs[1].sizes, (std::vector<Index>{50, 100}));
  EXPECT_EQ(reqs[1].name(), "random_qp_50x100_s4");
}

TEST(ProblemFile, TinyQpSolvesToOne) {
  const auto p = parse_problem(kTinyQp);
  EXPECT_EQ(p.n(), 1);
  EXPECT_EQ(p.m(), 1);
  const auto res = conic::solve(p, conic::SolveSettings{});
  EXPECT_EQ(res.record.status, Status::Solved);
  EXPECT_NEAR(res.residuals.x(0), 1.0, 1e-5);
}

TEST(ProblemFile, ConeDimensionMismatchIsSchemaError) {
  std::string text = kTinyQp;
  text.replace(text.find("\"dim\": 1"), 8, "\"dim\": 2");
  EXPECT_THROW(parse_problem(text), SchemaError);
}

TEST(ProblemFile, MalformedJsonReportsLine) {
  const std::string text = "{\n  \"n\": 1,\n  \"m\": ,\n}";
  try {
    parse_problem(text);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(ProblemFile, FieldContextInErrors) {
  std::string text = kTinyQp;
  text.replace(text.find("\"nonneg\""), 8, "\"banana\"");
  try {
    parse_problem(text);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("cones[0].kind"), std::string::npos) << e.what();
  }
}

TEST(ProblemFile, DuplicateTripletsAreSummed) {
  std::string text = kTinyQp;
  text.replace(text.find("\"A\": [{\"row\": 0, \"col\": 0, \"value\": 1}]"), 39,
               "\"A\": [{\"row\": 0, \"col\": 0, \"value\": 1}, {\"row\": 0, \"col\": 0, \"value\": 2.5}]");
  EXPECT_EQ(parse_problem(text).A(0, 0), 3.5);
}

TEST(ProblemFile, OutOfRangeIndexIsSchemaError) {
  std::string text = kTinyQp;
  text.replace(text.find("\"A\": [{\"row\": 0"), 15, "\"A\": [{\"row\": 4");
  EXPECT_THROW(parse_problem(text), SchemaError);
}

TEST(ProblemFile, MissingFileIsParseError) {
  EXPECT_THROW(load_problem("/nonexistent/problem.json"), ParseError);
}

TEST(ProblemFile, RoundTripIsIdentity) {
  const fs::path dir = temp_dir("roundtrip");
  for (const auto& r : {req(ProblemKind::RandomQP, {10, 20}, 1), req(ProblemKind::RandomSDP, {4, 3}, 2),
                        req(ProblemKind::Lasso, {5, 8}, 3), req(ProblemKind::Portfolio, {12, 3}, 4)}) {
    const auto p = generate(r);
    const fs::path file = dir / (r.name() + ".json");
    save_problem(p, file);
    EXPECT_TRUE(same_problem(load_problem(file), p)) << r.name();
  }
  conic::ConicProblem box;
  box.P = DenseMatrix::Zero(2, 2);
  box.q = Vector{{1.0, -1.0}};
  box.A = -DenseMatrix::Identity(2, 2);
  box.b = Vector::Zero(2);
  box.cones = {conic::ConeBlock::box(Vector{{-std::numeric_limits<double>::infinity(), 0.0}},
                                     Vector{{1.0, std::numeric_limits<double>::infinity()}})};
  EXPECT_TRUE(same_problem(parse_problem(serialize_problem(box)), box));
  fs::remove_all(dir);
}

TEST(Runner, TrivialProblemAllConfigurations) {
  std::vector<NamedProblem> problems{{"tiny", parse_problem(kTinyQp)}};
  const std::vector<SolverConfig> configs{SolverConfig::Vanilla, SolverConfig::Unsafe, SolverConfig::Safeguarded};
  const BenchSummary s = run_benchmark(problems, configs, BenchSettings{});
  ASSERT_EQ(s.runs.size(), 3u);
  for (const auto& r : s.runs) {
    EXPECT_TRUE(r.solved()) << to_string(r.config);
    EXPECT_NEAR(r.objective, s.runs[0].objective, 1e-5);
    EXPECT_EQ(r.operator_evaluations, static_cast<std::uint64_t>(r.iterations) + r.rejected);
  }
  for (const auto& c : s.configs) EXPECT_EQ(c.solved, 1);
}

TEST(Runner, SettingsPerConfiguration) {
  conic::SolveSettings base;
  EXPECT_FALSE(settings_for(SolverConfig::Vanilla, base).driver.accelerate);
  EXPECT_EQ(settings_for(SolverConfig::Unsafe, base).driver.safeguard_mode, SafeguardMode::Off);
  EXPECT_EQ(settings_for(SolverConfig::Safeguarded, base).driver.safeguard_mode, SafeguardMode::Relaxed);
  EXPECT_EQ(parse_config("unsafe"), SolverConfig::Unsafe);
  EXPECT_THROW(parse_config("fast"), std::invalid_argument);
}

TEST(Runner, CommonSubsetExcludesUnsolvedProblems) {
  auto make = [](std::string p, SolverConfig c, Status st, int iters) {
    RunResult r;
    r.problem = std::move(p);
    r.config = c;
    r.status = st;
    r.iterations = iters;
    r.solve_seconds = iters / 100.0;
    return r;
  };
  const std::vector<SolverConfig> configs{SolverConfig::Vanilla, SolverConfig::Unsafe};
  const std::vector<RunResult> runs{
      make("a", SolverConfig::Vanilla, Status::Solved, 100),
      make("a", SolverConfig::Unsafe, Status::Solved, 40),
      make("b", SolverConfig::Vanilla, Status::Solved, 1000),
      make("b", SolverConfig::Unsafe, Status::Diverged, 7),
  };
  const auto s = summarize(runs, configs, 300.0, 10.0);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].solved, 2);
  EXPECT_EQ(s[1].solved, 1);
  EXPECT_EQ(s[0].common, 1);
  EXPECT_EQ(s[0].mean_iterations, 100.0);
  EXPECT_EQ(s[1].mean_iterations, 40.0);
  // The unsolved run enters the geometric mean at the cap.
  EXPECT_NEAR(s[1].gmean_seconds, shifted_gmean({0.4, 300.0}, 10.0), 1e-12);
}

TEST(Runner, DeterministicIterationCounts) {
  std::vector<NamedProblem> problems;
  for (const auto& r : parse_generate_spec("random_qp:20x40:1-3")) problems.push_back({r.name(), generate(r)});
  const std::vector<SolverConfig> configs{SolverConfig::Vanilla, SolverConfig::Safeguarded};
  BenchSettings settings;
  const auto a = run_benchmark(problems, configs, settings);
  settings.threads = 2;
  const auto b = run_benchmark(problems, configs, settings);
  ASSERT_EQ(a.runs.size(), b.runs.size());
  for (std::size_t i = 0; i < a.runs.size(); ++i) {
    EXPECT_EQ(a.runs[i].problem, b.runs[i].problem);
    EXPECT_EQ(a.runs[i].config, b.runs[i].config);
    EXPECT_EQ(a.runs[i].iterations, b.runs[i].iterations);
    EXPECT_EQ(a.runs[i].rejected, b.runs[i].rejected);
  }
}

TEST(Runner, FailuresAreRecordedNotThrown) {
  conic::ConicProblem bad = parse_problem(kTinyQp);
  bad.P(0, 0) = -1.0;  // not quasi-definite for small gamma
  std::vector<NamedProblem> problems{{"bad", bad}, {"tiny", parse_problem(kTinyQp)}};
  BenchSettings settings;
  settings.solve.gamma = 10.0;
  const auto s = run_benchmark(problems, {SolverConfig::Safeguarded}, settings);
  ASSERT_EQ(s.runs.size(), 2u);
  EXPECT_FALSE(s.runs[0].error.empty());
  EXPECT_TRUE(s.runs[1].solved());
}

TEST(Runner, OutputFiles) {
  const fs::path dir = temp_dir("outputs");
  std::vector<NamedProblem> problems{{"tiny", parse_problem(kTinyQp)}};
  const auto s = run_benchmark(problems, {SolverConfig::Vanilla, SolverConfig::Safeguarded}, BenchSettings{});
  write_outputs(s, dir);
  const auto trace = read_lines(dir / "traces" / "tiny__safeguarded.csv");
  ASSERT_GE(trace.size(), 2u);
  EXPECT_EQ(trace[0], "iter,r_fixed_point,r_prim,r_dual,accepted,j,epoch,cum_operator_evals");
  EXPECT_EQ(trace.size(), static_cast<std::size_t>(s.runs[1].iterations) + 1);
  const auto summary = read_lines(dir / "summary.csv");
  EXPECT_EQ(summary.size(), 3u);
  EXPECT_EQ(read_lines(dir / "configs.csv").size(), 3u);
  fs::remove_all(dir);
}
