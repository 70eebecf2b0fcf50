#include "safeaa/driver.hpp"
#include "support/affine.hpp"

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace safeaa;

namespace {

using fixture::make_affine;

// F(v) = c A v + b with c adjustable through params().
class ScaledAffine final : public FixedPointOperator {
 public:
  ScaledAffine(DenseMatrix a, Vector b) : a_(std::move(a)), b_(std::move(b)) {}
  Index dim() const override { return b_.size(); }
  Vector params() const override { return Vector::Constant(1, c_); }

 protected:
  Vector evaluate(const Vector& v) override { return c_ * (a_ * v) + b_; }
  bool install_params(const Vector& rho) override {
    if (rho(0) == c_) return false;
    c_ = rho(0);
    return true;
  }

 private:
  DenseMatrix a_;
  Vector b_;
  double c_ = 1.0;
};

Index first_below(const RunRecord& rec, double tol) {
  for (const auto& e : rec.trace)
    if (e.r_norm <= tol) return e.k + 1;
  return -1;
}

}  // namespace

TEST(Safeguard, RelaxedExamples) {
  EXPECT_TRUE(safeguard_relaxed(1.0, 0.6, 2.0));
  EXPECT_FALSE(safeguard_relaxed(1.3, 0.6, 2.0));
}

TEST(Safeguard, StrictExamples) {
  EXPECT_TRUE(safeguard_strict(0.4, 0.5, 0.9));
  EXPECT_FALSE(safeguard_strict(0.5, 0.5, 0.9));
  EXPECT_TRUE(safeguard_strict(0.0, 0.0, 0.9));
  EXPECT_TRUE(safeguard_strict(0.0, 3.0, 0.9));
}

TEST(DriverConfig, Defaults) {
  const DriverConfig cfg;
  EXPECT_EQ(cfg.tau, 2.0);
  EXPECT_EQ(cfg.eta_max, 1e4);
  EXPECT_EQ(cfg.m_max, 15);
  EXPECT_EQ(cfg.check_interval, 25);
  EXPECT_EQ(cfg.variant, AccelVariant::TypeII);
  EXPECT_NO_THROW(cfg.validate());
}

TEST(DriverConfig, RejectsOutOfRange) {
  DriverConfig cfg;
  cfg.safeguard_mode = SafeguardMode::Strict;
  EXPECT_THROW(cfg.validate(), NumericError);
  cfg.tau = 0.9;
  EXPECT_NO_THROW(cfg.validate());
  DriverConfig relaxed;
  relaxed.tau = 2.5;
  EXPECT_THROW(relaxed.validate(), NumericError);
  DriverConfig small;
  small.m_max = 1;
  EXPECT_THROW(small.validate(), NumericError);
}

TEST(Driver, FreshMemoryTakesPicardStep) {
  AffineOperator op = make_affine(5, 0.5, 1);
  SafeguardedDriver d(op, Vector::Zero(5), DriverConfig{});
  const Vector f0 = d.state().f;
  const TraceEntry e = d.step();
  EXPECT_EQ(e.j, 1);
  EXPECT_FALSE(e.attempted);
  EXPECT_EQ(e.evaluations, 1u);
  EXPECT_EQ(d.state().v, f0);
}

TEST(Driver, AcceptedCandidateReusesEvaluation) {
  AffineOperator op = make_affine(5, 0.5, 2);
  SafeguardedDriver d(op, Vector::Zero(5), DriverConfig{});
  d.step();
  d.step();
  const TraceEntry e = d.step();
  ASSERT_EQ(e.j, 3);
  ASSERT_TRUE(e.accepted);
  EXPECT_EQ(e.evaluations, 3u);
  // The cached f is F(v) for the accepted v.
  const Vector f = d.state().f;
  AffineOperator check = make_affine(5, 0.5, 2);
  EXPECT_LT((check.apply(d.state().v) - f).norm(), 1e-14);
}

TEST(Driver, RejectedCandidateCostsTwoEvaluations) {
  AffineOperator op = make_affine(5, 0.5, 3);
  DriverConfig cfg;
  cfg.tau = 1e-12;  // nothing passes
  SafeguardedDriver d(op, Vector::Zero(5), cfg);
  d.step();
  const TraceEntry before = d.step();
  const TraceEntry e = d.step();
  ASSERT_TRUE(e.attempted);
  EXPECT_FALSE(e.accepted);
  EXPECT_EQ(e.evaluations - before.evaluations, 2u);
  EXPECT_GT(e.r_acc_norm, cfg.tau * e.r_ref_norm);
}

TEST(Driver, EvaluationsReconcile) {
  AffineOperator op = make_affine(20, 0.95, 4);
  DriverConfig cfg;
  cfg.tau = 0.3;
  cfg.eps = 1e-10;
  const RunRecord rec = run(op, Vector::Zero(20), cfg);
  EXPECT_GT(rec.rejected, 0u);
  EXPECT_EQ(rec.operator_evaluations, static_cast<std::uint64_t>(rec.iterations) + rec.rejected);
  EXPECT_EQ(op.evaluations(), rec.operator_evaluations + rec.setup_evaluations);
}

TEST(Driver, IdentityConvergesAtFirstCheck) {
  IdentityOperator op(3);
  const RunRecord rec = run(op, Vector{{1.0, 2.0, 3.0}}, DriverConfig{});
  EXPECT_EQ(rec.status, Status::Solved);
  EXPECT_EQ(rec.iterations, 25);
  EXPECT_EQ(rec.accepted, 0u);

  IdentityOperator op2(3);
  const RunRecord van = run_vanilla(op2, Vector{{1.0, 2.0, 3.0}}, DriverConfig{});
  EXPECT_EQ(van.status, Status::Solved);
  int checks = 0;
  for (const auto& e : van.trace) checks += e.convergence_checked ? 1 : 0;
  EXPECT_EQ(checks, 1);
}

TEST(Driver, AffineAccelerationVersusPicard) {
  const Index n = 10;
  AffineOperator op = make_affine(n, 0.9, 5);
  const Vector v_star = (DenseMatrix::Identity(n, n) - op.matrix()).fullPivLu().solve(op.offset());

  DriverConfig cfg;
  cfg.m_max = 12;
  cfg.eps = 1e-12;
  cfg.check_interval = 1;
  DriverHooks hooks;
  hooks.check = residual_norm_test(1e-12);
  const RunRecord acc = run(op, Vector::Zero(n), cfg, hooks);
  EXPECT_EQ(acc.status, Status::Solved);
  EXPECT_LE(acc.iterations, 15);
  EXPECT_LT((acc.final_state.v - v_star).norm(), 1e-8);

  AffineOperator op2 = make_affine(n, 0.9, 5);
  const RunRecord pic = run_vanilla(op2, Vector::Zero(n), cfg, hooks);
  EXPECT_GT(pic.iterations, 100);
}

TEST(Driver, UnsafeNeverSlowerOnLinearProblems) {
  for (std::uint64_t seed = 10; seed < 15; ++seed) {
    AffineOperator a = make_affine(10, 0.9, seed);
    AffineOperator b = make_affine(10, 0.9, seed);
    DriverConfig cfg;
    cfg.check_interval = 1;
    DriverHooks hooks;
    hooks.check = residual_norm_test(1e-10);
    const RunRecord unsafe = run_unsafe(a, Vector::Zero(10), cfg, hooks);
    const RunRecord safe = run(b, Vector::Zero(10), cfg, hooks);
    EXPECT_LE(unsafe.iterations, safe.iterations) << "seed " << seed;
    EXPECT_LE(first_below(unsafe, 1e-10), 12);
  }
}

TEST(Driver, PicardRateMatchesSpectralRadius) {
  AffineOperator op = make_affine(10, 0.9, 6);
  DriverConfig cfg;
  cfg.max_iter = 150;
  cfg.eps = 1e-300;
  const RunRecord rec = run_vanilla(op, Vector::Zero(10), cfg);
  const double rate = std::pow(rec.trace[140].r_norm / rec.trace[40].r_norm, 1.0 / 100.0);
  EXPECT_NEAR(rate, 0.9, 5e-3);
}

TEST(Driver, NonFiniteOperatorDiverges) {
  FunctionOperator op(2, [](const Vector& v) -> Vector {
    if (v.norm() > 1e3) return Vector::Constant(2, std::nan(""));
    return 3.0 * v + Vector::Ones(2);
  });
  const RunRecord rec = run_unsafe(op, Vector::Zero(2), DriverConfig{});
  EXPECT_EQ(rec.status, Status::Diverged);
}

TEST(Driver, ConstantOperatorBehavesAsPicard) {
  const Vector c{{1.0, -1.0}};
  FunctionOperator op(2, [c](const Vector&) { return c; });
  const RunRecord rec = run_unsafe(op, Vector::Zero(2), DriverConfig{});
  EXPECT_EQ(rec.status, Status::Solved);
  EXPECT_EQ(rec.final_state.v, c);
  EXPECT_EQ(rec.accepted, 0u);
}

TEST(Driver, MaxIterationsStatus) {
  AffineOperator op = make_affine(4, 0.999, 7);
  DriverConfig cfg;
  cfg.max_iter = 30;
  cfg.eps = 1e-300;
  const RunRecord rec = run_vanilla(op, Vector::Zero(4), cfg);
  EXPECT_EQ(rec.status, Status::MaxIterations);
  EXPECT_EQ(rec.iterations, 30);
  EXPECT_EQ(rec.trace.size(), 30u);
}

TEST(Driver, SchedulingInvariantsUnderParameterChanges) {
  AffineOperator base = make_affine(12, 0.97, 8);
  ScaledAffine op(base.matrix(), base.offset());
  DriverConfig cfg;
  cfg.adapt_interval = 7;
  cfg.check_interval = 5;
  cfg.eps = 1e-300;
  cfg.max_iter = 400;
  cfg.m_max = 6;
  DriverHooks hooks;
  hooks.update_rule = [](const FixedPointOperator& o, const FixedPointState&) -> Vector {
    return Vector::Constant(1, o.params()(0) == 1.0 ? 0.9 : 1.0);
  };
  int hook_calls = 0;
  hooks.infeasibility = [&hook_calls](const Vector&) -> std::optional<Certificate> {
    ++hook_calls;
    return std::nullopt;
  };
  const RunRecord rec = run(op, Vector::Zero(12), cfg, hooks);

  int changes = 0;
  for (std::size_t i = 0; i < rec.trace.size(); ++i) {
    const auto& e = rec.trace[i];
    if (e.accepted || e.attempted) EXPECT_GT(e.j, 2) << "iteration " << e.k;
    if (e.infeasibility_checked) EXPECT_EQ(e.j_end, 2) << "iteration " << e.k;
    if (e.epoch_changed) {
      ++changes;
      EXPECT_EQ(e.j_end, 1);
      if (i + 1 < rec.trace.size()) EXPECT_EQ(rec.trace[i + 1].j, 1);
    }
    EXPECT_LE(e.j_end, cfg.m_max);
  }
  EXPECT_GT(changes, 5);
  EXPECT_GT(hook_calls, 5);
}

TEST(Driver, TypeOneVariantConverges) {
  AffineOperator op = make_affine(10, 0.9, 9);
  DriverConfig cfg;
  cfg.variant = AccelVariant::TypeI;
  cfg.check_interval = 1;
  DriverHooks hooks;
  hooks.check = residual_norm_test(1e-10);
  const RunRecord rec = run(op, Vector::Zero(10), cfg, hooks);
  EXPECT_EQ(rec.status, Status::Solved);
  EXPECT_LT(rec.iterations, 60);
}
