#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace safeaa {

using Vector = Eigen::VectorXd;
// Column-major dense storage; every kernel in this library works on it.
using DenseMatrix = Eigen::MatrixXd;
using Index = Eigen::Index;

using Epoch = std::uint64_t;

enum class ErrorCode {
  ColumnRankDeficient,
  SingularTriangular,
  SingularSystem,
  NotQuasiDefinite,
  NoConvergence,
  NonFiniteOutput,
  DimensionMismatch,
  InvalidArgument,
};

const char* to_string(ErrorCode code);

class NumericError : public std::runtime_error {
 public:
  NumericError(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

enum class CertificateKind { PrimalInfeasible, DualInfeasible };

/// Witness of primal or dual infeasibility, scaled to unit infinity norm.
struct Certificate {
  CertificateKind kind;
  Vector witness;
};

}  // namespace safeaa
