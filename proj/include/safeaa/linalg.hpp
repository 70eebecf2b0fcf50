#pragma once

#include "safeaa/types.hpp"

namespace safeaa::linalg {

/// Thin QR factorization of a matrix that grows one column at a time.
///
/// `q` is preallocated to n x capacity and `r` to capacity x capacity; only
/// the leading `cols` columns (and the leading cols x cols block of `r`) are
/// meaningful. Entries of `r` below the diagonal are exact zeros.
struct QrState {
  DenseMatrix q;
  DenseMatrix r;
  Index cols = 0;

  QrState() = default;
  QrState(Index rows, Index capacity);

  Index rows() const { return q.rows(); }
  Index capacity() const { return q.cols(); }
  bool empty() const { return cols == 0; }
  bool full() const { return cols == capacity(); }

  auto active_q() const { return q.leftCols(cols); }
  auto active_r() const { return r.topLeftCorner(cols, cols); }

  void clear();
};

/// Relative threshold on the orthogonalized remainder below which a column
/// is considered to lie in the span of the existing ones.
inline constexpr double kCollinearityTol = 1e-14;
/// Relative pivot threshold for back substitution on R.
inline constexpr double kTriangularPivotTol = 1e-12;

/// Appends `col` using modified Gram-Schmidt followed by one full
/// reorthogonalization pass. Throws ColumnRankDeficient (leaving `state`
/// untouched) when the remainder is negligible relative to ||col||.
void qr_append_column(QrState& state, const Eigen::Ref<const Vector>& col);

/// Least-squares solution of min ||rhs - Q R eta|| by R eta = Q^T rhs.
Vector qr_solve_ls(const QrState& state, const Eigen::Ref<const Vector>& rhs);

/// Dense LU with partial pivoting for small square systems. Throws
/// SingularSystem when a pivot falls below 1e-12 times the largest entry.
Vector lu_solve(DenseMatrix a, Vector rhs);

/// L D L^T factor of a symmetric quasi-definite matrix, computed without
/// pivoting. `l` is unit lower triangular (stored densely).
struct LdlFactor {
  DenseMatrix l;
  Vector d;

  Index dim() const { return d.size(); }
};

inline constexpr double kLdlPivotTol = 1e-14;

/// The first `n_pos` pivots must come out positive and the rest negative;
/// anything else (or |d_i| < 1e-14) raises NotQuasiDefinite.
LdlFactor ldl_factor(const DenseMatrix& k, Index n_pos);

Vector ldl_solve(const LdlFactor& f, const Eigen::Ref<const Vector>& rhs);

struct SymmetricEigen {
  Vector values;
  DenseMatrix vectors;  // columns are eigenvectors
};

/// Cyclic Jacobi eigensolver. Sweeps until the off-diagonal Frobenius norm is
/// below 1e-12 ||S||_F; NoConvergence after 100 sweeps.
SymmetricEigen eigh_symmetric(const DenseMatrix& s);

}  // namespace safeaa::linalg
