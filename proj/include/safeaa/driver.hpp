#pragma once

#include "safeaa/accel.hpp"
#include "safeaa/operator.hpp"
#include "safeaa/types.hpp"

#include <chrono>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace safeaa {

enum class SafeguardMode { Relaxed, Strict, Off };

enum class Status {
  Solved,
  MaxIterations,
  TimeLimit,
  Diverged,
  PrimalInfeasible,
  DualInfeasible,
};

const char* to_string(Status status);
const char* to_string(SafeguardMode mode);

struct DriverConfig {
  double eps = 1e-6;
  double tau = 2.0;
  double eta_max = 1e4;
  int m_max = 15;
  AccelVariant variant = AccelVariant::TypeII;
  SafeguardMode safeguard_mode = SafeguardMode::Relaxed;
  bool accelerate = true;
  int check_interval = 25;
  std::int64_t max_iter = 10000;
  // Iterations between operator-change requests; 0 disables adaptation.
  int adapt_interval = 40;
  double time_limit = std::numeric_limits<double>::infinity();

  /// Throws InvalidArgument on out-of-range settings.
  void validate() const;
};

/// ||r_acc|| <= tau ||r(v_{k-1})||, tau in (0, 2].
bool safeguard_relaxed(double r_acc_norm, double r_prev_norm, double tau);
/// ||r_acc|| <= tau ||r(v_k)||, tau in (0, 1).
bool safeguard_strict(double r_acc_norm, double r_curr_norm, double tau);

struct ConvergenceReport {
  bool converged = false;
  double r_prim = std::numeric_limits<double>::quiet_NaN();
  double r_dual = std::numeric_limits<double>::quiet_NaN();
};

/// Callbacks that specialize the loop to a particular solver.
struct DriverHooks {
  /// Called every check_interval iterations. Defaults to ||v_{k+1} - v_k|| <= eps.
  std::function<ConvergenceReport(const FixedPointState&)> check;
  /// Called with v_{k+1} - v_k of a pure operator step, only when the memory
  /// pointer is 2. Optional.
  std::function<std::optional<Certificate>(const Vector& dv)> infeasibility;
  /// Parameter update rule applied at scheduled operator changes. Optional.
  UpdateRule update_rule;
};

/// Default convergence test on the last step length.
std::function<ConvergenceReport(const FixedPointState&)> step_norm_test(double eps);
/// Convergence test on the fixed-point residual ||v - F(v)||_2.
std::function<ConvergenceReport(const FixedPointState&)> residual_norm_test(double eps);

struct TraceEntry {
  std::int64_t k = 0;
  double r_norm = 0.0;  // ||r_{k+1}|| after the step
  double r_prim = std::numeric_limits<double>::quiet_NaN();
  double r_dual = std::numeric_limits<double>::quiet_NaN();
  double r_acc_norm = std::numeric_limits<double>::quiet_NaN();
  double r_ref_norm = std::numeric_limits<double>::quiet_NaN();  // right-hand side of the safeguard
  bool attempted = false;  // a candidate was evaluated
  bool accepted = false;
  int j = 1;      // pointer after the history update; acceleration iff j > 2
  int j_end = 1;  // pointer at the end of the iteration
  Epoch epoch = 0;
  bool epoch_changed = false;
  bool infeasibility_checked = false;
  bool convergence_checked = false;
  std::uint64_t evaluations = 0;  // cumulative, excluding the initial F(v_0)
  double elapsed_seconds = 0.0;
  double accel_seconds = 0.0;
};

struct RunRecord {
  std::vector<TraceEntry> trace;
  Status status = Status::MaxIterations;
  std::int64_t iterations = 0;
  std::uint64_t operator_evaluations = 0;  // per-iteration evaluations
  std::uint64_t setup_evaluations = 1;     // F(v_0)
  std::uint64_t rejected = 0;
  std::uint64_t accepted = 0;
  std::uint64_t restarts = 0;
  double total_seconds = 0.0;
  double accel_seconds = 0.0;
  std::optional<Certificate> certificate;
  FixedPointState final_state;

  double accel_fraction() const { return total_seconds > 0.0 ? accel_seconds / total_seconds : 0.0; }
};

/// Safeguarded Anderson acceleration with restarted memory and scheduled
/// operator changes / infeasibility checks.
class SafeguardedDriver {
 public:
  SafeguardedDriver(FixedPointOperator& op, const Vector& v0, DriverConfig cfg, DriverHooks hooks = {});

  /// Executes one iteration; returns its trace entry. Throws NumericError
  /// (NonFiniteOutput) when the operator diverges.
  TraceEntry step();

  /// Iterates until convergence, infeasibility, divergence or a limit.
  RunRecord run();

  const FixedPointState& state() const { return state_; }
  const AccelMemory& memory() const { return memory_; }
  const DriverConfig& config() const { return cfg_; }
  bool operator_change_pending() const { return change_pending_; }
  bool infeasibility_check_pending() const { return infeasibility_pending_; }

  /// Latches a parameter update for the next non-accelerated iteration.
  void schedule_operator_change() { change_pending_ = true; }
  void schedule_infeasibility_check() { infeasibility_pending_ = true; }

 private:
  using Clock = std::chrono::steady_clock;

  void restart_memory();
  void finish(Status status);

  FixedPointOperator& op_;
  DriverConfig cfg_;
  DriverHooks hooks_;
  AccelMemory memory_;
  FixedPointState state_;

  Vector v_prev_;
  Vector r_prev_;
  bool have_prev_ = false;
  Epoch prev_epoch_ = 0;
  Epoch state_epoch_ = 0;  // epoch under which state_.f was computed

  bool change_pending_ = false;
  bool infeasibility_pending_ = false;

  RunRecord record_;
  std::optional<Status> final_status_;
  std::uint64_t evals_base_ = 0;
  Clock::time_point start_;
};

RunRecord run(FixedPointOperator& op, const Vector& v0, const DriverConfig& cfg,
              const DriverHooks& hooks = {});
/// Plain Picard iteration with the same termination machinery.
RunRecord run_vanilla(FixedPointOperator& op, const Vector& v0, DriverConfig cfg,
                      const DriverHooks& hooks = {});
/// Acceleration with the eta guard but without the residual safeguard.
RunRecord run_unsafe(FixedPointOperator& op, const Vector& v0, DriverConfig cfg,
                     const DriverHooks& hooks = {});

}  // namespace safeaa
