#include "safeaa/operator.hpp"

#include <string>

namespace safeaa {

Vector FixedPointOperator::apply(const Vector& v) {
  if (v.size() != dim()) {
    throw NumericError(ErrorCode::DimensionMismatch,
                       "apply: input has " + std::to_string(v.size()) + " entries, operator dim " +
                           std::to_string(dim()));
  }
  ++evaluations_;
  Vector f = evaluate(v);
  if (!f.allFinite()) {
    throw NumericError(ErrorCode::NonFiniteOutput, "apply: operator produced a non-finite entry");
  }
  return f;
}

bool FixedPointOperator::set_params(const Vector& rho) {
  if (!rho.allFinite()) {
    throw NumericError(ErrorCode::InvalidArgument, "set_params: non-finite parameter vector");
  }
  if (!install_params(rho)) return false;
  ++epoch_;
  return true;
}

Epoch update_params(FixedPointOperator& op, const UpdateRule& rule, const FixedPointState& state) {
  if (!rule) return op.epoch();
  const Vector current = op.params();
  Vector proposed = rule(op, state);
  if (proposed.size() == current.size() && proposed == current) return op.epoch();
  op.set_params(proposed);
  return op.epoch();
}

AffineOperator::AffineOperator(DenseMatrix a, Vector b) : a_(std::move(a)), b_(std::move(b)) {
  if (a_.rows() != b_.size() || a_.cols() != b_.size()) {
    throw NumericError(ErrorCode::DimensionMismatch, "AffineOperator: A must be n x n with b of size n");
  }
}

Vector AffineOperator::evaluate(const Vector& v) {
  Vector f = b_;
  f.noalias() += a_ * v;
  return f;
}

}  // namespace safeaa
