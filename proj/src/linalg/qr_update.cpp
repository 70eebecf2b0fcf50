#include "safeaa/linalg.hpp"

#include <cmath>
#include <string>

namespace safeaa::linalg {

QrState::QrState(Index rows, Index capacity)
    : q(DenseMatrix::Zero(rows, capacity)),
      r(DenseMatrix::Zero(capacity, capacity)) {}

void QrState::clear() {
  q.leftCols(cols).setZero();
  r.topLeftCorner(cols, cols).setZero();
  cols = 0;
}

void qr_append_column(QrState& state, const Eigen::Ref<const Vector>& col) {
  if (col.size() != state.rows()) {
    throw NumericError(ErrorCode::DimensionMismatch,
                       "qr_append_column: column has " + std::to_string(col.size()) +
                           " entries, expected " + std::to_string(state.rows()));
  }
  if (state.full()) {
    throw NumericError(ErrorCode::InvalidArgument, "qr_append_column: capacity exhausted");
  }

  const Index j = state.cols;
  Vector w = col;
  Vector h = Vector::Zero(j);
  // Two MGS passes; the second one restores orthogonality lost to cancellation.
  for (int pass = 0; pass < 2; ++pass) {
    for (Index i = 0; i < j; ++i) {
      const double c = state.q.col(i).dot(w);
      h(i) += c;
      w.noalias() -= c * state.q.col(i);
    }
  }

  const double rho = w.norm();
  if (!(rho > kCollinearityTol * col.norm())) {
    throw NumericError(ErrorCode::ColumnRankDeficient,
                       "qr_append_column: column is numerically in the span of the factor");
  }

  state.q.col(j) = w / rho;
  state.r.col(j).head(j) = h;
  state.r(j, j) = rho;
  state.r.col(j).tail(state.capacity() - j - 1).setZero();
  state.cols = j + 1;
}

Vector qr_solve_ls(const QrState& state, const Eigen::Ref<const Vector>& rhs) {
  if (rhs.size() != state.rows()) {
    throw NumericError(ErrorCode::DimensionMismatch, "qr_solve_ls: rhs dimension mismatch");
  }
  if (state.empty()) {
    throw NumericError(ErrorCode::SingularTriangular, "qr_solve_ls: empty factorization");
  }
  const auto r = state.active_r();
  const double max_diag = r.diagonal().cwiseAbs().maxCoeff();
  for (Index i = 0; i < state.cols; ++i) {
    if (!(std::abs(r(i, i)) > kTriangularPivotTol * max_diag)) {
      throw NumericError(ErrorCode::SingularTriangular,
                         "qr_solve_ls: pivot " + std::to_string(i) + " below tolerance");
    }
  }
  Vector eta = state.active_q().transpose() * rhs;
  r.triangularView<Eigen::Upper>().solveInPlace(eta);
  return eta;
}

Vector lu_solve(DenseMatrix a, Vector rhs) {
  const Index n = a.rows();
  if (a.cols() != n || rhs.size() != n) {
    throw NumericError(ErrorCode::DimensionMismatch, "lu_solve: dimension mismatch");
  }
  if (n == 0) return rhs;
  const double scale = a.cwiseAbs().maxCoeff();

  for (Index k = 0; k < n; ++k) {
    Index p = k;
    a.col(k).tail(n - k).cwiseAbs().maxCoeff(&p);
    p += k;
    if (!(std::abs(a(p, k)) >= 1e-12 * scale) || scale == 0.0) {
      throw NumericError(ErrorCode::SingularSystem,
                         "lu_solve: pivot " + std::to_string(k) + " below tolerance");
    }
    if (p != k) {
      a.row(p).swap(a.row(k));
      std::swap(rhs(p), rhs(k));
    }
    for (Index i = k + 1; i < n; ++i) {
      const double l = a(i, k) / a(k, k);
      a.row(i).tail(n - k) -= l * a.row(k).tail(n - k);
      rhs(i) -= l * rhs(k);
    }
  }
  a.triangularView<Eigen::Upper>().solveInPlace(rhs);
  return rhs;
}

}  // namespace safeaa::linalg
