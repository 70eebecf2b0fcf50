#pragma once

#include "safeaa/driver.hpp"
#include "safeaa/linalg.hpp"
#include "safeaa/operator.hpp"
#include "safeaa/types.hpp"

#include <optional>
#include <vector>

namespace safeaa::conic {

enum class ConeKind { Zero, Nonneg, Box, SecondOrder, PsdTriangle };

const char* to_string(ConeKind kind);

/// One block of the product cone K. Box blocks carry their bounds (entries
/// may be +-infinity); PSD blocks hold the scaled lower triangle of a
/// symmetric matrix, column by column, with off-diagonals multiplied by sqrt(2).
struct ConeBlock {
  ConeKind kind = ConeKind::Zero;
  Index dim = 0;
  Vector lower;
  Vector upper;

  static ConeBlock zero(Index dim);
  static ConeBlock nonneg(Index dim);
  static ConeBlock box(Vector lower, Vector upper);
  static ConeBlock second_order(Index dim);
  static ConeBlock psd_triangle(Index side);

  void validate() const;

  friend bool operator==(const ConeBlock& a, const ConeBlock& b);
};

/// Side length s with s (s + 1) / 2 == dim; throws if there is none.
Index psd_side(Index dim);
DenseMatrix svec_to_matrix(const Eigen::Ref<const Vector>& v, Index side);
Vector matrix_to_svec(const DenseMatrix& m);

/// Euclidean projection onto one block, in place.
void project_cone_inplace(const ConeBlock& block, Eigen::Ref<Vector> v);
Vector project_cone(const ConeBlock& block, const Vector& v);

/// Projection onto the recession cone of the block (the block itself for
/// cones; per-entry sign restrictions for boxes).
void project_recession(const ConeBlock& block, Eigen::Ref<Vector> v);
/// Projection onto the dual cone K* (all of R^dim for the zero cone).
void project_dual(const ConeBlock& block, Eigen::Ref<Vector> v);

/// minimize 1/2 x'Px + q'x  subject to  Ax + s = b, s in K.
struct ConicProblem {
  DenseMatrix P;
  Vector q;
  DenseMatrix A;
  Vector b;
  std::vector<ConeBlock> cones;

  Index n() const { return q.size(); }
  Index m() const { return b.size(); }

  /// Throws InvalidArgument describing the first violated invariant.
  void validate() const;
  double objective(const Vector& x) const;
};

/// Applies the projection onto K blockwise to a vector of length m.
void project_product(const std::vector<ConeBlock>& cones, Eigen::Ref<Vector> s);

struct Residuals {
  double r_prim = 0.0;  // ||Ax + s - b||_inf
  double r_dual = 0.0;  // ||Px + q + A'y||_inf
  double prim_scale = 1.0;
  double dual_scale = 1.0;
  Vector x;
  Vector s;
  Vector y;
};

inline constexpr double kGammaMin = 1e-6;
inline constexpr double kGammaMax = 1e6;

/// Douglas-Rachford operator for the conic problem with
///   f(x, s) = 1/2 x'Px + q'x + I{Ax + s = b},  g(x, s) = I{R^n x K}.
/// Iterates v live in R^(n+m). The parameter vector is (gamma).
class DrsOperator final : public FixedPointOperator {
 public:
  explicit DrsOperator(ConicProblem problem, double gamma = 1.0);

  Index dim() const override { return problem_.n() + problem_.m(); }
  Vector params() const override { return Vector::Constant(1, gamma_); }

  double gamma() const { return gamma_; }
  const ConicProblem& problem() const { return problem_; }
  const linalg::LdlFactor& kkt() const { return kkt_; }

  /// Solves [[P + I/gamma, A'], [A, -gamma I]] (x, lambda) = rhs with
  /// iterative refinement against the unregularized matrix.
  Vector solve_kkt(const Vector& rhs) const;

  /// prox_{gamma f}(v) = (x, v_s - gamma lambda).
  Vector prox_f(const Vector& v) const;
  /// Projection onto R^n x K.
  Vector project_g(const Vector& u) const;

  /// Primal/dual iterates and residuals extracted at v.
  Residuals residuals(const Vector& v) const;

  /// Residual-balancing step size, or the current gamma inside the deadband.
  double proposed_gamma(const Residuals& res) const;

  /// Update rule wrapping proposed_gamma; leaves gamma alone once both
  /// residuals are below `eps`.
  UpdateRule gamma_rule(double eps) const;

  /// Inspects the difference of two successive pure iterates for a primal or
  /// dual infeasibility certificate.
  std::optional<Certificate> infeasibility_check(const Vector& dv, double eps_inf = 1e-6) const;

 protected:
  Vector evaluate(const Vector& v) override;
  bool install_params(const Vector& rho) override;

 private:
  void factor();
  Vector kkt_multiply(const Vector& x) const;

  ConicProblem problem_;
  double gamma_;
  linalg::LdlFactor kkt_;

  // z and w of the last evaluation, keyed by its input.
  Vector last_v_;
  Vector last_z_;
  Vector last_w_;
};

inline constexpr double kStaticRegularization = 1e-7;
inline constexpr int kRefinementSteps = 3;

struct SolveSettings {
  DriverConfig driver;
  double gamma = 1.0;
  bool adapt_gamma = true;
  double eps_inf = 1e-6;
};

struct SolveResult {
  RunRecord record;
  Residuals residuals;
  double objective = 0.0;
  double final_gamma = 1.0;
};

/// Hooks wiring the DRS residual test, infeasibility detection and step-size
/// adaptation into the driver.
DriverHooks make_hooks(DrsOperator& op, double eps, double eps_inf, bool adapt_gamma);

SolveResult solve(const ConicProblem& problem, const SolveSettings& settings);

}  // namespace safeaa::conic
