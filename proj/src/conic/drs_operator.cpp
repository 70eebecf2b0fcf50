#include "safeaa/conic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace safeaa::conic {

namespace {

double inf_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

}  // namespace

DrsOperator::DrsOperator(ConicProblem problem, double gamma)
    : problem_(std::move(problem)), gamma_(std::clamp(gamma, kGammaMin, kGammaMax)) {
  problem_.validate();
  if (!(gamma > 0.0)) throw NumericError(ErrorCode::InvalidArgument, "DrsOperator: gamma must be positive");
  factor();
}

void DrsOperator::factor() {
  const Index n = problem_.n();
  const Index m = problem_.m();
  DenseMatrix k(n + m, n + m);
  k.topLeftCorner(n, n) = problem_.P;
  k.topLeftCorner(n, n).diagonal().array() += 1.0 / gamma_ + kStaticRegularization;
  k.topRightCorner(n, m) = problem_.A.transpose();
  k.bottomLeftCorner(m, n) = problem_.A;
  k.bottomRightCorner(m, m) = DenseMatrix::Identity(m, m) * -(gamma_ + kStaticRegularization);
  kkt_ = linalg::ldl_factor(k, n);
  last_v_.resize(0);
}

bool DrsOperator::install_params(const Vector& rho) {
  if (rho.size() != 1) {
    throw NumericError(ErrorCode::DimensionMismatch, "DrsOperator: parameter vector is (gamma)");
  }
  const double g = std::clamp(rho(0), kGammaMin, kGammaMax);
  if (g == gamma_) return false;
  gamma_ = g;
  factor();
  return true;
}

Vector DrsOperator::kkt_multiply(const Vector& x) const {
  const Index n = problem_.n();
  const Index m = problem_.m();
  Vector out(n + m);
  out.head(n).noalias() = problem_.P * x.head(n);
  out.head(n) += x.head(n) / gamma_;
  out.head(n).noalias() += problem_.A.transpose() * x.tail(m);
  out.tail(m).noalias() = problem_.A * x.head(n);
  out.tail(m) -= gamma_ * x.tail(m);
  return out;
}

Vector DrsOperator::solve_kkt(const Vector& rhs) const {
  Vector x = linalg::ldl_solve(kkt_, rhs);
  for (int i = 0; i < kRefinementSteps; ++i) {
    const Vector res = rhs - kkt_multiply(x);
    if (res.cwiseAbs().maxCoeff() == 0.0) break;
    x += linalg::ldl_solve(kkt_, res);
  }
  return x;
}

Vector DrsOperator::prox_f(const Vector& v) const {
  const Index n = problem_.n();
  const Index m = problem_.m();
  Vector rhs(n + m);
  rhs.head(n) = v.head(n) / gamma_ - problem_.q;
  rhs.tail(m) = problem_.b - v.tail(m);
  Vector sol = solve_kkt(rhs);
  Vector z(n + m);
  z.head(n) = sol.head(n);
  z.tail(m) = v.tail(m) - gamma_ * sol.tail(m);
  return z;
}

Vector DrsOperator::project_g(const Vector& u) const {
  Vector w = u;
  project_product(problem_.cones, w.tail(problem_.m()));
  return w;
}

Vector DrsOperator::evaluate(const Vector& v) {
  Vector z = prox_f(v);
  Vector w = project_g(2.0 * z - v);
  Vector f = v + w - z;
  last_v_ = v;
  last_z_ = std::move(z);
  last_w_ = std::move(w);
  return f;
}

Residuals DrsOperator::residuals(const Vector& v) const {
  const Index n = problem_.n();
  const Index m = problem_.m();
  Vector z;
  Vector w;
  if (last_v_.size() == v.size() && last_v_ == v) {
    z = last_z_;
    w = last_w_;
  } else {
    z = prox_f(v);
    w = project_g(2.0 * z - v);
  }

  Residuals res;
  res.x = z.head(n);
  res.s = w.tail(m);
  res.y = (v.tail(m) - z.tail(m)) / gamma_;

  const Vector ax = problem_.A * res.x;
  const Vector px = problem_.P * res.x;
  const Vector aty = problem_.A.transpose() * res.y;
  res.r_prim = inf_norm(ax + res.s - problem_.b);
  res.r_dual = inf_norm(px + problem_.q + aty);
  res.prim_scale = std::max({inf_norm(ax), inf_norm(res.s), inf_norm(problem_.b), 1.0});
  res.dual_scale = std::max({inf_norm(px), inf_norm(problem_.q), inf_norm(aty), 1.0});
  return res;
}

double DrsOperator::proposed_gamma(const Residuals& res) const {
  const double prim = res.r_prim / res.prim_scale;
  const double dual = res.r_dual / res.dual_scale;
  if (prim == 0.0 && dual == 0.0) return gamma_;
  double factor = 10.0;
  if (prim == 0.0) {
    factor = 0.1;
  } else if (dual > 0.0) {
    factor = std::clamp(std::sqrt(prim / dual), 0.1, 10.0);
  }
  if (factor >= 0.2 && factor <= 5.0) return gamma_;
  return std::clamp(gamma_ / factor, kGammaMin, kGammaMax);
}

UpdateRule DrsOperator::gamma_rule(double eps) const {
  return [this, eps](const FixedPointOperator&, const FixedPointState& state) -> Vector {
    const Residuals res = residuals(state.v);
    if (res.r_prim <= eps && res.r_dual <= eps) return params();
    return Vector::Constant(1, proposed_gamma(res));
  };
}

std::optional<Certificate> DrsOperator::infeasibility_check(const Vector& dv, double eps_inf) const {
  const Index n = problem_.n();
  const Index m = problem_.m();
  if (dv.size() != n + m) {
    throw NumericError(ErrorCode::DimensionMismatch, "infeasibility_check: dimension mismatch");
  }
  // prox_f is affine in v; push dv through its linear part.
  Vector rhs(n + m);
  rhs.head(n) = dv.head(n) / gamma_;
  rhs.tail(m) = -dv.tail(m);
  const Vector sol = solve_kkt(rhs);
  const Vector dx = sol.head(n);
  const Vector dy = sol.tail(m);

  const double nx = inf_norm(dx);
  if (nx > 1e-10) {
    const Vector d = dx / nx;
    Vector t = -(problem_.A * d);
    Vector proj = t;
    Index offset = 0;
    for (const auto& block : problem_.cones) {
      project_recession(block, proj.segment(offset, block.dim));
      offset += block.dim;
    }
    if (inf_norm(problem_.P * d) <= eps_inf && problem_.q.dot(d) < -eps_inf &&
        inf_norm(t - proj) <= eps_inf) {
      return Certificate{CertificateKind::DualInfeasible, d};
    }
  }

  const double ny = inf_norm(dy);
  if (ny > 1e-10) {
    const Vector y = dy / ny;
    if (inf_norm(problem_.A.transpose() * y) <= eps_inf) {
      constexpr double inf = std::numeric_limits<double>::infinity();
      double support = 0.0;  // sup over s in K of <-y, s>
      Index offset = 0;
      for (const auto& block : problem_.cones) {
        const auto yb = y.segment(offset, block.dim);
        if (block.kind == ConeKind::Box) {
          for (Index i = 0; i < block.dim; ++i) {
            const double c = -yb(i);
            const double bound = c > 0.0 ? block.upper(i) : block.lower(i);
            if (std::isinf(bound)) {
              if (std::abs(c) > eps_inf) support = inf;
            } else {
              support += c * bound;
            }
          }
        } else {
          Vector proj = yb;
          project_dual(block, proj);
          if (inf_norm(yb - proj) > eps_inf) support = inf;
        }
        offset += block.dim;
      }
      if (problem_.b.dot(y) + support < -eps_inf) {
        return Certificate{CertificateKind::PrimalInfeasible, y};
      }
    }
  }
  return std::nullopt;
}

DriverHooks make_hooks(DrsOperator& op, double eps, double eps_inf, bool adapt_gamma) {
  DriverHooks hooks;
  hooks.check = [&op, eps](const FixedPointState& state) {
    const Residuals res = op.residuals(state.v);
    return ConvergenceReport{res.r_prim <= eps && res.r_dual <= eps, res.r_prim, res.r_dual};
  };
  hooks.infeasibility = [&op, eps_inf](const Vector& dv) { return op.infeasibility_check(dv, eps_inf); };
  if (adapt_gamma) hooks.update_rule = op.gamma_rule(eps);
  return hooks;
}

SolveResult solve(const ConicProblem& problem, const SolveSettings& settings) {
  DrsOperator op(problem, settings.gamma);
  const DriverHooks hooks = make_hooks(op, settings.driver.eps, settings.eps_inf, settings.adapt_gamma);
  SolveResult out;
  out.record = run(op, Vector::Zero(op.dim()), settings.driver, hooks);
  out.residuals = op.residuals(out.record.final_state.v);
  out.objective = problem.objective(out.residuals.x);
  out.final_gamma = op.gamma();
  return out;
}

}  // namespace safeaa::conic
