#pragma once

#include "safeaa/linalg.hpp"
#include "safeaa/types.hpp"

namespace safeaa {

enum class AccelVariant { TypeI, TypeII };

/// Anderson coefficients eta for the difference form of the update.
struct Coefficients {
  Vector eta;
  double norm2 = 0.0;
};

/// Restarted difference history for Anderson acceleration.
///
/// Holds the columns dv_i = v_{i+1} - v_i and dr_i = r_{i+1} - r_i, at most
/// m_max of each. The column pointer j is 1 + the number of stored columns,
/// so a fresh memory has j == 1 and acceleration needs j > 2. For the type-II
/// variant a thin QR factor of the r-differences is kept up to date on every
/// push.
class AccelMemory {
 public:
  AccelMemory(Index dim, int m_max, AccelVariant variant = AccelVariant::TypeII);

  Index dim() const { return v_diffs_.rows(); }
  int m_max() const { return m_max_; }
  AccelVariant variant() const { return variant_; }
  int columns() const { return static_cast<int>(cols_); }
  int j() const { return columns() + 1; }
  bool full() const { return cols_ == m_max_; }
  Epoch epoch() const { return epoch_; }

  auto v_diffs() const { return v_diffs_.leftCols(cols_); }
  auto r_diffs() const { return r_diffs_.leftCols(cols_); }
  const linalg::QrState& qr() const { return qr_; }

  /// Appends one (dv, dr) pair. Throws ColumnRankDeficient if dr is collinear
  /// with the stored r-differences (type-II only); the memory is unchanged in
  /// that case and the caller is expected to restart it.
  void push(const Vector& dv, const Vector& dr);

  Coefficients compute_eta(const Vector& r) const;
  Coefficients compute_eta_type2(const Vector& r) const;
  Coefficients compute_eta_type1(const Vector& r) const;

  /// v_acc = f - (V - R) eta
  Vector candidate(const Vector& f, const Coefficients& eta) const;

  void restart(Epoch epoch);

 private:
  int m_max_;
  AccelVariant variant_;
  DenseMatrix v_diffs_;
  DenseMatrix r_diffs_;
  linalg::QrState qr_;
  Index cols_ = 0;
  Epoch epoch_ = 0;
};

/// True iff ||eta||_2 <= eta_max.
bool eta_guard(const Coefficients& eta, double eta_max);

/// Recovers the affine-combination weights alpha (length eta.size() + 1,
/// summing to one) from eta.
Vector alpha_from_eta(const Vector& eta);

}  // namespace safeaa
