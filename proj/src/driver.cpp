#include "safeaa/driver.hpp"

#include <cmath>
#include <string>

namespace safeaa {

const char* to_string(Status status) {
  switch (status) {
    case Status::Solved: return "solved";
    case Status::MaxIterations: return "max_iterations";
    case Status::TimeLimit: return "time_limit";
    case Status::Diverged: return "diverged";
    case Status::PrimalInfeasible: return "primal_infeasible";
    case Status::DualInfeasible: return "dual_infeasible";
  }
  return "unknown";
}

const char* to_string(SafeguardMode mode) {
  switch (mode) {
    case SafeguardMode::Relaxed: return "relaxed";
    case SafeguardMode::Strict: return "strict";
    case SafeguardMode::Off: return "off";
  }
  return "unknown";
}

void DriverConfig::validate() const {
  auto fail = [](const std::string& msg) {
    throw NumericError(ErrorCode::InvalidArgument, "DriverConfig: " + msg);
  };
  if (!(eps > 0.0)) fail("eps must be positive");
  if (safeguard_mode == SafeguardMode::Strict) {
    if (!(tau > 0.0 && tau < 1.0)) fail("strict safeguard requires tau in (0, 1)");
  } else if (!(tau > 0.0 && tau <= 2.0)) {
    fail("tau must lie in (0, 2]");
  }
  if (!(eta_max > 0.0)) fail("eta_max must be positive");
  if (m_max < 2) fail("m_max must be at least 2");
  if (check_interval < 1) fail("check_interval must be at least 1");
  if (max_iter < 1) fail("max_iter must be at least 1");
  if (adapt_interval < 0) fail("adapt_interval must be non-negative");
  if (!(time_limit > 0.0)) fail("time_limit must be positive");
}

bool safeguard_relaxed(double r_acc_norm, double r_prev_norm, double tau) {
  return r_acc_norm <= tau * r_prev_norm;
}

bool safeguard_strict(double r_acc_norm, double r_curr_norm, double tau) {
  return r_acc_norm <= tau * r_curr_norm;
}

std::function<ConvergenceReport(const FixedPointState&)> step_norm_test(double eps) {
  return [eps](const FixedPointState& s) { return ConvergenceReport{s.step_norm <= eps}; };
}

std::function<ConvergenceReport(const FixedPointState&)> residual_norm_test(double eps) {
  return [eps](const FixedPointState& s) { return ConvergenceReport{s.r_norm <= eps}; };
}

SafeguardedDriver::SafeguardedDriver(FixedPointOperator& op, const Vector& v0, DriverConfig cfg,
                                     DriverHooks hooks)
    : op_(op),
      cfg_(cfg),
      hooks_(std::move(hooks)),
      memory_(op.dim(), cfg.m_max, cfg.variant) {
  cfg_.validate();
  if (v0.size() != op_.dim()) {
    throw NumericError(ErrorCode::DimensionMismatch, "SafeguardedDriver: v0 dimension mismatch");
  }
  if (!hooks_.check) hooks_.check = step_norm_test(cfg_.eps);

  start_ = Clock::now();
  state_.v = v0;
  state_.f = op_.apply(state_.v);
  state_.r = state_.v - state_.f;
  state_.r_norm = state_.r.norm();
  state_epoch_ = op_.epoch();
  memory_.restart(op_.epoch());
  evals_base_ = op_.evaluations();
}

void SafeguardedDriver::restart_memory() {
  memory_.restart(op_.epoch());
  ++record_.restarts;
}

void SafeguardedDriver::finish(Status status) {
  if (!final_status_) final_status_ = status;
}

TraceEntry SafeguardedDriver::step() {
  TraceEntry e;
  e.k = state_.k;
  double accel_seconds = 0.0;

  // Parameters changed behind our back: the stored history is stale.
  if (memory_.epoch() != op_.epoch()) restart_memory();

  // (a) history update, only for differences taken under a single operator
  if (cfg_.accelerate && have_prev_ && prev_epoch_ == state_epoch_ &&
      state_epoch_ == memory_.epoch()) {
    const auto t0 = Clock::now();
    try {
      memory_.push(state_.v - v_prev_, state_.r - r_prev_);
    } catch (const NumericError& err) {
      if (err.code() != ErrorCode::ColumnRankDeficient) throw;
      restart_memory();
    }
    accel_seconds += std::chrono::duration<double>(Clock::now() - t0).count();
  }
  e.j = memory_.j();

  // (b) acceleration attempt
  bool acc_success = false;
  if (cfg_.accelerate && e.j > 2) {
    const auto t0 = Clock::now();
    std::optional<Vector> v_acc;
    try {
      const Coefficients eta = memory_.compute_eta(state_.r);
      if (std::isfinite(eta.norm2) && eta_guard(eta, cfg_.eta_max)) {
        v_acc = memory_.candidate(state_.f, eta);
      }
    } catch (const NumericError& err) {
      if (err.code() != ErrorCode::SingularTriangular && err.code() != ErrorCode::SingularSystem) {
        throw;
      }
    }
    accel_seconds += std::chrono::duration<double>(Clock::now() - t0).count();

    if (v_acc) {
      e.attempted = true;
      Vector f_acc = op_.apply(*v_acc);
      Vector r_acc = *v_acc - f_acc;
      e.r_acc_norm = r_acc.norm();
      bool pass = true;
      switch (cfg_.safeguard_mode) {
        case SafeguardMode::Relaxed:
          e.r_ref_norm = state_.r_prev_norm;
          pass = safeguard_relaxed(e.r_acc_norm, e.r_ref_norm, cfg_.tau);
          break;
        case SafeguardMode::Strict:
          e.r_ref_norm = state_.r_norm;
          pass = safeguard_strict(e.r_acc_norm, e.r_ref_norm, cfg_.tau);
          break;
        case SafeguardMode::Off:
          break;
      }
      if (pass) {
        v_prev_ = std::move(state_.v);
        r_prev_ = std::move(state_.r);
        prev_epoch_ = state_epoch_;
        state_.v = std::move(*v_acc);
        state_.f = std::move(f_acc);
        state_.r = std::move(r_acc);
        acc_success = true;
        e.accepted = true;
        ++record_.accepted;
      } else {
        ++record_.rejected;
      }
    }
  }

  // (c) scheduled operator change, then the safeguarding Picard step
  if (!acc_success) {
    if (change_pending_) {
      change_pending_ = false;
      if (hooks_.update_rule) {
        const Epoch before = op_.epoch();
        update_params(op_, hooks_.update_rule, state_);
        if (op_.epoch() != before) {
          e.epoch_changed = true;
          restart_memory();
        }
      }
    }
    v_prev_ = std::move(state_.v);
    r_prev_ = std::move(state_.r);
    prev_epoch_ = state_epoch_;
    state_.v = state_.f;
    state_.f = op_.apply(state_.v);
    state_epoch_ = op_.epoch();
    state_.r = state_.v - state_.f;
  }
  have_prev_ = true;
  state_.acc_success = acc_success;
  state_.r_prev_norm = r_prev_.norm();
  state_.r_norm = state_.r.norm();
  state_.step_norm = (state_.v - v_prev_).norm();

  // (d) infeasibility detection needs a pure operator step
  if (infeasibility_pending_ && (!cfg_.accelerate || memory_.j() == 2)) {
    infeasibility_pending_ = false;
    if (hooks_.infeasibility) {
      e.infeasibility_checked = true;
      if (auto cert = hooks_.infeasibility(state_.v - v_prev_)) {
        finish(cert->kind == CertificateKind::PrimalInfeasible ? Status::PrimalInfeasible
                                                               : Status::DualInfeasible);
        record_.certificate = std::move(cert);
      }
    }
  }

  // (e) restarted memory
  if (cfg_.accelerate && memory_.j() > cfg_.m_max) restart_memory();
  e.j_end = memory_.j();
  e.epoch = op_.epoch();

  ++state_.k;
  if (!final_status_ && state_.k % cfg_.check_interval == 0) {
    const ConvergenceReport rep = hooks_.check(state_);
    e.convergence_checked = true;
    e.r_prim = rep.r_prim;
    e.r_dual = rep.r_dual;
    if (rep.converged) finish(Status::Solved);
    infeasibility_pending_ = true;
  }
  if (cfg_.adapt_interval > 0 && state_.k % cfg_.adapt_interval == 0) change_pending_ = true;
  if (state_.k >= cfg_.max_iter) finish(Status::MaxIterations);

  e.r_norm = state_.r_norm;
  e.evaluations = op_.evaluations() - evals_base_;
  e.accel_seconds = accel_seconds;
  e.elapsed_seconds = std::chrono::duration<double>(Clock::now() - start_).count();
  if (e.elapsed_seconds > cfg_.time_limit) finish(Status::TimeLimit);
  record_.accel_seconds += accel_seconds;
  record_.trace.push_back(e);
  return e;
}

RunRecord SafeguardedDriver::run() {
  while (!final_status_) {
    try {
      step();
    } catch (const NumericError& err) {
      if (err.code() != ErrorCode::NonFiniteOutput) throw;
      finish(Status::Diverged);
    }
  }
  record_.status = *final_status_;
  record_.iterations = state_.k;
  record_.operator_evaluations = op_.evaluations() - evals_base_;
  record_.total_seconds = std::chrono::duration<double>(Clock::now() - start_).count();
  record_.final_state = state_;
  return record_;
}

RunRecord run(FixedPointOperator& op, const Vector& v0, const DriverConfig& cfg,
              const DriverHooks& hooks) {
  SafeguardedDriver driver(op, v0, cfg, hooks);
  return driver.run();
}

RunRecord run_vanilla(FixedPointOperator& op, const Vector& v0, DriverConfig cfg,
                      const DriverHooks& hooks) {
  cfg.accelerate = false;
  return run(op, v0, cfg, hooks);
}

RunRecord run_unsafe(FixedPointOperator& op, const Vector& v0, DriverConfig cfg,
                     const DriverHooks& hooks) {
  cfg.accelerate = true;
  cfg.safeguard_mode = SafeguardMode::Off;
  return run(op, v0, cfg, hooks);
}

}  // namespace safeaa
