#include "safeaa/conic.hpp"

#include <string>

namespace safeaa::conic {

void ConicProblem::validate() const {
  auto fail = [](const std::string& msg) {
    throw NumericError(ErrorCode::InvalidArgument, "ConicProblem: " + msg);
  };
  const Index n = this->n();
  const Index m = this->m();
  if (P.rows() != n || P.cols() != n) fail("P must be n x n");
  if (A.rows() != m || A.cols() != n) fail("A must be m x n");
  if (!P.allFinite() || !q.allFinite() || !A.allFinite() || !b.allFinite()) {
    fail("problem data must be finite");
  }
  if ((P - P.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, P.cwiseAbs().maxCoeff())) {
    fail("P is not symmetric");
  }
  Index total = 0;
  for (const auto& block : cones) {
    block.validate();
    total += block.dim;
  }
  if (total != m) {
    fail("cone dimensions sum to " + std::to_string(total) + " but m = " + std::to_string(m));
  }
}

double ConicProblem::objective(const Vector& x) const {
  return 0.5 * x.dot(P * x) + q.dot(x);
}

}  // namespace safeaa::conic
