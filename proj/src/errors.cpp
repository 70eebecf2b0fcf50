#include "safeaa/types.hpp"

namespace safeaa {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ColumnRankDeficient: return "ColumnRankDeficient";
    case ErrorCode::SingularTriangular: return "SingularTriangular";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::NotQuasiDefinite: return "NotQuasiDefinite";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NonFiniteOutput: return "NonFiniteOutput";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace safeaa
