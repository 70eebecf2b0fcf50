#include "safeaa/linalg.hpp"

#include <cmath>
#include <string>

namespace safeaa::linalg {

LdlFactor ldl_factor(const DenseMatrix& k, Index n_pos) {
  const Index n = k.rows();
  if (k.cols() != n || n_pos < 0 || n_pos > n) {
    throw NumericError(ErrorCode::DimensionMismatch, "ldl_factor: bad dimensions");
  }

  LdlFactor f{DenseMatrix::Identity(n, n), Vector::Zero(n)};
  Vector ld(n);  // scratch: L(j, 0:j) .* d(0:j)
  for (Index j = 0; j < n; ++j) {
    ld.head(j) = f.l.row(j).head(j).transpose().cwiseProduct(f.d.head(j));
    const double dj = k(j, j) - f.l.row(j).head(j).dot(ld.head(j));
    const bool want_positive = j < n_pos;
    if (std::abs(dj) < kLdlPivotTol || (want_positive ? dj <= 0.0 : dj >= 0.0) ||
        !std::isfinite(dj)) {
      throw NumericError(ErrorCode::NotQuasiDefinite,
                         "ldl_factor: pivot " + std::to_string(j) + " = " + std::to_string(dj) +
                             (want_positive ? " (expected > 0)" : " (expected < 0)"));
    }
    f.d(j) = dj;
    const Index below = n - j - 1;
    if (below > 0) {
      f.l.col(j).tail(below) =
          (k.col(j).tail(below) - f.l.bottomLeftCorner(below, j) * ld.head(j)) / dj;
    }
  }
  return f;
}

Vector ldl_solve(const LdlFactor& f, const Eigen::Ref<const Vector>& rhs) {
  if (rhs.size() != f.dim()) {
    throw NumericError(ErrorCode::DimensionMismatch, "ldl_solve: rhs dimension mismatch");
  }
  Vector x = rhs;
  f.l.triangularView<Eigen::UnitLower>().solveInPlace(x);
  x.array() /= f.d.array();
  f.l.transpose().triangularView<Eigen::UnitUpper>().solveInPlace(x);
  return x;
}

}  // namespace safeaa::linalg
