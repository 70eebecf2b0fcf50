#include "safeaa/accel.hpp"

#include <string>

namespace safeaa {

namespace {

Coefficients make_coefficients(Vector eta) {
  Coefficients c;
  c.norm2 = eta.norm();
  c.eta = std::move(eta);
  return c;
}

}  // namespace

AccelMemory::AccelMemory(Index dim, int m_max, AccelVariant variant)
    : m_max_(m_max),
      variant_(variant),
      v_diffs_(DenseMatrix::Zero(dim, m_max)),
      r_diffs_(DenseMatrix::Zero(dim, m_max)) {
  if (m_max < 1) {
    throw NumericError(ErrorCode::InvalidArgument, "AccelMemory: m_max must be positive");
  }
  if (variant_ == AccelVariant::TypeII) qr_ = linalg::QrState(dim, m_max);
}

void AccelMemory::push(const Vector& dv, const Vector& dr) {
  if (dv.size() != dim() || dr.size() != dim()) {
    throw NumericError(ErrorCode::DimensionMismatch, "AccelMemory::push: dimension mismatch");
  }
  if (full()) {
    throw NumericError(ErrorCode::InvalidArgument,
                       "AccelMemory::push: memory already holds m_max = " + std::to_string(m_max_) +
                           " columns");
  }
  if (variant_ == AccelVariant::TypeII) linalg::qr_append_column(qr_, dr);
  v_diffs_.col(cols_) = dv;
  r_diffs_.col(cols_) = dr;
  ++cols_;
}

Coefficients AccelMemory::compute_eta(const Vector& r) const {
  return variant_ == AccelVariant::TypeII ? compute_eta_type2(r) : compute_eta_type1(r);
}

Coefficients AccelMemory::compute_eta_type2(const Vector& r) const {
  if (variant_ != AccelVariant::TypeII) {
    throw NumericError(ErrorCode::InvalidArgument, "compute_eta_type2 on a type-I memory");
  }
  return make_coefficients(linalg::qr_solve_ls(qr_, r));
}

Coefficients AccelMemory::compute_eta_type1(const Vector& r) const {
  if (cols_ == 0) {
    throw NumericError(ErrorCode::SingularSystem, "compute_eta_type1: empty memory");
  }
  if (r.size() != dim()) {
    throw NumericError(ErrorCode::DimensionMismatch, "compute_eta_type1: dimension mismatch");
  }
  const auto v = v_diffs();
  DenseMatrix vtr = v.transpose() * r_diffs();
  Vector rhs = v.transpose() * r;
  return make_coefficients(linalg::lu_solve(std::move(vtr), std::move(rhs)));
}

Vector AccelMemory::candidate(const Vector& f, const Coefficients& eta) const {
  if (eta.eta.size() != cols_ || f.size() != dim()) {
    throw NumericError(ErrorCode::DimensionMismatch, "candidate: coefficient length mismatch");
  }
  const DenseMatrix diff = v_diffs() - r_diffs();
  Vector out = f;
  out.noalias() -= diff * eta.eta;
  return out;
}

void AccelMemory::restart(Epoch epoch) {
  v_diffs_.leftCols(cols_).setZero();
  r_diffs_.leftCols(cols_).setZero();
  if (variant_ == AccelVariant::TypeII) qr_.clear();
  cols_ = 0;
  epoch_ = epoch;
}

bool eta_guard(const Coefficients& eta, double eta_max) { return eta.norm2 <= eta_max; }

Vector alpha_from_eta(const Vector& eta) {
  const Index m = eta.size();
  Vector alpha(m + 1);
  if (m == 0) {
    alpha(0) = 1.0;
    return alpha;
  }
  alpha(0) = eta(0);
  for (Index i = 1; i < m; ++i) alpha(i) = eta(i) - eta(i - 1);
  alpha(m) = 1.0 - eta(m - 1);
  return alpha;
}

}  // namespace safeaa
