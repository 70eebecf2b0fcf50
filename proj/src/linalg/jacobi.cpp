#include "safeaa/linalg.hpp"

#include <cmath>

namespace safeaa::linalg {

namespace {

double off_diagonal_norm(const DenseMatrix& a) {
  // Summed directly: total - diagonal cancels catastrophically near convergence.
  double sum = 0.0;
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i)
      if (i != j) sum += a(i, j) * a(i, j);
  return std::sqrt(sum);
}

}  // namespace

SymmetricEigen eigh_symmetric(const DenseMatrix& s) {
  const Index n = s.rows();
  if (s.cols() != n) {
    throw NumericError(ErrorCode::DimensionMismatch, "eigh_symmetric: matrix not square");
  }

  DenseMatrix a = s;
  DenseMatrix v = DenseMatrix::Identity(n, n);
  const double target = 1e-12 * s.norm();

  for (int sweep = 0; sweep <= 100; ++sweep) {
    if (off_diagonal_norm(a) <= target) {
      return {a.diagonal(), std::move(v)};
    }
    if (sweep == 100) break;

    for (Index p = 0; p + 1 < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;

        Vector ap = a.col(p);
        a.col(p) = c * ap - sn * a.col(q);
        a.col(q) = sn * ap + c * a.col(q);
        Vector rp = a.row(p).transpose();
        a.row(p) = (c * rp - sn * a.row(q).transpose()).transpose();
        a.row(q) = (sn * rp + c * a.row(q).transpose()).transpose();
        a(p, q) = 0.0;
        a(q, p) = 0.0;

        Vector vp = v.col(p);
        v.col(p) = c * vp - sn * v.col(q);
        v.col(q) = sn * vp + c * v.col(q);
      }
    }
  }
  throw NumericError(ErrorCode::NoConvergence, "eigh_symmetric: no convergence after 100 sweeps");
}

}  // namespace safeaa::linalg
