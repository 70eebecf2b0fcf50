#pragma once

#include "safeaa/types.hpp"

#include <cstdint>
#include <functional>

namespace safeaa {

/// Iterate snapshot handed to parameter-update rules and convergence tests.
///
/// `f` is F(v) under the operator's current epoch and `r = v - f`.
struct FixedPointState {
  Vector v;
  Vector f;
  Vector r;
  std::int64_t k = 0;
  double r_norm = 0.0;
  double r_prev_norm = 0.0;  // ||r(v_{k-1})||_2
  double step_norm = 0.0;    // ||v_k - v_{k-1}||_2
  bool acc_success = false;
};

/// A parametric fixed-point map F_rho : R^n -> R^n.
///
/// Evaluation goes through apply(), which counts evaluations and rejects
/// non-finite output. Every effective parameter change bumps the epoch; for a
/// fixed epoch apply() is deterministic.
class FixedPointOperator {
 public:
  virtual ~FixedPointOperator() = default;

  virtual Index dim() const = 0;

  Vector apply(const Vector& v);

  Epoch epoch() const { return epoch_; }
  std::uint64_t evaluations() const { return evaluations_; }

  /// Current parameter vector rho. Operators without parameters return an
  /// empty vector.
  virtual Vector params() const { return {}; }

  /// Installs `rho`. Returns true (and increments the epoch) only if the
  /// effective parameters changed.
  bool set_params(const Vector& rho);

 protected:
  virtual Vector evaluate(const Vector& v) = 0;

  /// Rebuild whatever depends on rho. Returns false if the request leaves
  /// the effective parameters unchanged (e.g. after clipping).
  virtual bool install_params(const Vector& /*rho*/) { return false; }

 private:
  Epoch epoch_ = 0;
  std::uint64_t evaluations_ = 0;
};

/// u(F_rho, v_k, f_k, r_k, rho) -> rho*. Returning op.params() unchanged is legal.
using UpdateRule = std::function<Vector(const FixedPointOperator& op, const FixedPointState& state)>;

/// Applies `rule` and installs the result. Returns the operator's epoch afterwards.
Epoch update_params(FixedPointOperator& op, const UpdateRule& rule, const FixedPointState& state);

/// F(v) = A v + b.
class AffineOperator final : public FixedPointOperator {
 public:
  AffineOperator(DenseMatrix a, Vector b);

  Index dim() const override { return b_.size(); }
  const DenseMatrix& matrix() const { return a_; }
  const Vector& offset() const { return b_; }

 protected:
  Vector evaluate(const Vector& v) override;

 private:
  DenseMatrix a_;
  Vector b_;
};

class IdentityOperator final : public FixedPointOperator {
 public:
  explicit IdentityOperator(Index dim) : dim_(dim) {}
  Index dim() const override { return dim_; }

 protected:
  Vector evaluate(const Vector& v) override { return v; }

 private:
  Index dim_;
};

/// Wraps an arbitrary callable; handy for scripted test scenarios.
class FunctionOperator final : public FixedPointOperator {
 public:
  FunctionOperator(Index dim, std::function<Vector(const Vector&)> fn)
      : dim_(dim), fn_(std::move(fn)) {}
  Index dim() const override { return dim_; }

 protected:
  Vector evaluate(const Vector& v) override { return fn_(v); }

 private:
  Index dim_;
  std::function<Vector(const Vector&)> fn_;
};

}  // namespace safeaa
