#include "safeaa/conic.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace safeaa::conic {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

[[noreturn]] void invalid(const std::string& msg) {
  throw NumericError(ErrorCode::InvalidArgument, msg);
}

void project_soc(Eigen::Ref<Vector> v) {
  if (v.size() == 0) return;
  const double t = v(0);
  const double xn = v.tail(v.size() - 1).norm();
  if (xn <= t) return;
  if (xn <= -t) {
    v.setZero();
    return;
  }
  const double a = 0.5 * (t + xn);
  v(0) = a;
  v.tail(v.size() - 1) *= a / xn;
}

void project_psd(Eigen::Ref<Vector> v) {
  const Index side = psd_side(v.size());
  const auto eig = linalg::eigh_symmetric(svec_to_matrix(v, side));
  const Vector clamped = eig.values.cwiseMax(0.0);
  const DenseMatrix m = eig.vectors * clamped.asDiagonal() * eig.vectors.transpose();
  v = matrix_to_svec(m);
}

}  // namespace

const char* to_string(ConeKind kind) {
  switch (kind) {
    case ConeKind::Zero: return "zero";
    case ConeKind::Nonneg: return "nonneg";
    case ConeKind::Box: return "box";
    case ConeKind::SecondOrder: return "soc";
    case ConeKind::PsdTriangle: return "psd";
  }
  return "unknown";
}

ConeBlock ConeBlock::zero(Index dim) { return {ConeKind::Zero, dim, {}, {}}; }
ConeBlock ConeBlock::nonneg(Index dim) { return {ConeKind::Nonneg, dim, {}, {}}; }
ConeBlock ConeBlock::second_order(Index dim) { return {ConeKind::SecondOrder, dim, {}, {}}; }
ConeBlock ConeBlock::psd_triangle(Index side) {
  return {ConeKind::PsdTriangle, side * (side + 1) / 2, {}, {}};
}
ConeBlock ConeBlock::box(Vector lower, Vector upper) {
  const Index dim = lower.size();
  return {ConeKind::Box, dim, std::move(lower), std::move(upper)};
}

bool operator==(const ConeBlock& a, const ConeBlock& b) {
  if (a.kind != b.kind || a.dim != b.dim) return false;
  if (a.kind != ConeKind::Box) return true;
  return a.lower.size() == b.lower.size() && a.upper.size() == b.upper.size() &&
         a.lower == b.lower && a.upper == b.upper;
}

void ConeBlock::validate() const {
  if (dim < 0) invalid("cone block with negative dimension");
  switch (kind) {
    case ConeKind::Box:
      if (lower.size() != dim || upper.size() != dim) invalid("box bounds do not match the block dimension");
      for (Index i = 0; i < dim; ++i) {
        if (std::isnan(lower(i)) || std::isnan(upper(i)) || !(lower(i) <= upper(i)) ||
            lower(i) == std::numeric_limits<double>::infinity() ||
            upper(i) == -std::numeric_limits<double>::infinity()) {
          invalid("box bound " + std::to_string(i) + " violates l <= u");
        }
      }
      break;
    case ConeKind::SecondOrder:
      if (dim < 1) invalid("second-order cone needs dimension >= 1");
      break;
    case ConeKind::PsdTriangle:
      psd_side(dim);
      break;
    default:
      break;
  }
}

Index psd_side(Index dim) {
  const auto side = static_cast<Index>(std::llround((std::sqrt(8.0 * static_cast<double>(dim) + 1.0) - 1.0) / 2.0));
  if (side * (side + 1) / 2 != dim) {
    invalid("PSD block dimension " + std::to_string(dim) + " is not triangular");
  }
  return side;
}

DenseMatrix svec_to_matrix(const Eigen::Ref<const Vector>& v, Index side) {
  DenseMatrix m(side, side);
  Index idx = 0;
  for (Index j = 0; j < side; ++j) {
    m(j, j) = v(idx++);
    for (Index i = j + 1; i < side; ++i) {
      m(i, j) = v(idx++) / kSqrt2;
      m(j, i) = m(i, j);
    }
  }
  return m;
}

Vector matrix_to_svec(const DenseMatrix& m) {
  const Index side = m.rows();
  Vector v(side * (side + 1) / 2);
  Index idx = 0;
  for (Index j = 0; j < side; ++j) {
    v(idx++) = m(j, j);
    for (Index i = j + 1; i < side; ++i) v(idx++) = 0.5 * (m(i, j) + m(j, i)) * kSqrt2;
  }
  return v;
}

void project_cone_inplace(const ConeBlock& block, Eigen::Ref<Vector> v) {
  switch (block.kind) {
    case ConeKind::Zero:
      v.setZero();
      break;
    case ConeKind::Nonneg:
      v = v.cwiseMax(0.0);
      break;
    case ConeKind::Box:
      v = v.cwiseMax(block.lower).cwiseMin(block.upper);
      break;
    case ConeKind::SecondOrder:
      project_soc(v);
      break;
    case ConeKind::PsdTriangle:
      project_psd(v);
      break;
  }
}

Vector project_cone(const ConeBlock& block, const Vector& v) {
  Vector out = v;
  project_cone_inplace(block, out);
  return out;
}

void project_recession(const ConeBlock& block, Eigen::Ref<Vector> v) {
  if (block.kind != ConeKind::Box) {
    project_cone_inplace(block, v);
    return;
  }
  constexpr double inf = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < v.size(); ++i) {
    const bool lo_finite = block.lower(i) > -inf;
    const bool hi_finite = block.upper(i) < inf;
    if (lo_finite && hi_finite) {
      v(i) = 0.0;
    } else if (lo_finite) {
      v(i) = std::max(v(i), 0.0);
    } else if (hi_finite) {
      v(i) = std::min(v(i), 0.0);
    }
  }
}

void project_dual(const ConeBlock& block, Eigen::Ref<Vector> v) {
  switch (block.kind) {
    case ConeKind::Zero:
      break;
    case ConeKind::Nonneg:
    case ConeKind::SecondOrder:
    case ConeKind::PsdTriangle:
      project_cone_inplace(block, v);
      break;
    case ConeKind::Box:
      invalid("project_dual: boxes are not cones");
  }
}

void project_product(const std::vector<ConeBlock>& cones, Eigen::Ref<Vector> s) {
  Index offset = 0;
  for (const auto& block : cones) {
    project_cone_inplace(block, s.segment(offset, block.dim));
    offset += block.dim;
  }
}

}  // namespace safeaa::conic
