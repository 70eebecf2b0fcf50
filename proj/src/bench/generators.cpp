#include "safeaa/bench.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace safeaa::bench {

using conic::ConeBlock;
using conic::ConicProblem;

namespace {

struct Rng {
  explicit Rng(std::uint64_t seed) : engine(seed) {}

  double normal() { return gauss(engine); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine); }

  Vector normal_vector(Index n) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v(i) = normal();
    return v;
  }
  DenseMatrix normal_matrix(Index r, Index c) {
    DenseMatrix m(r, c);
    // Fill column by column so the draw order is fixed.
    for (Index j = 0; j < c; ++j)
      for (Index i = 0; i < r; ++i) m(i, j) = normal();
    return m;
  }

  std::mt19937_64 engine;
  std::normal_distribution<double> gauss{0.0, 1.0};
};

void require(bool ok, const std::string& msg) {
  if (!ok) throw InvalidParams(msg);
}

// Exact symmetry, so that an upper-triangle round trip reproduces P bit for bit.
void mirror_upper(DenseMatrix& m) {
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = j + 1; i < m.rows(); ++i) m(i, j) = m(j, i);
}

Index size_at(const GenerateRequest& req, std::size_t i, Index fallback) {
  return i < req.sizes.size() ? req.sizes[i] : fallback;
}

ConicProblem random_qp(const GenerateRequest& req) {
  const Index n = size_at(req, 0, 50);
  const Index m = size_at(req, 1, 100);
  require(n >= 2 && m >= 2, "random_qp needs n >= 2 and m >= 2");
  Rng rng(req.seed);

  const Index rank = std::max<Index>(1, n / 2);
  const DenseMatrix g = rng.normal_matrix(rank, n);
  ConicProblem p;
  p.P = g.transpose() * g / static_cast<double>(rank);
  p.P.diagonal().array() += 1e-2;
  mirror_upper(p.P);
  p.q = rng.normal_vector(n);
  p.A = rng.normal_matrix(m, n) / std::sqrt(static_cast<double>(n));

  const Index m_eq = std::clamp<Index>(m / 10, 1, n - 1);
  const Index m_ineq = m - m_eq;
  const Vector x0 = rng.normal_vector(n);
  Vector s0 = Vector::Zero(m);
  for (Index i = m_eq; i < m; ++i) {
    const double u = rng.uniform(0.0, 1.0);
    s0(i) = u < 0.5 ? 0.0 : u;
  }
  p.b = p.A * x0 + s0;
  p.cones = {ConeBlock::zero(m_eq), ConeBlock::nonneg(m_ineq)};
  return p;
}

ConicProblem portfolio(const GenerateRequest& req) {
  const Index assets = size_at(req, 0, 100);
  const Index factors = size_at(req, 1, 10);
  require(assets >= 2 && factors >= 1, "portfolio needs assets >= 2 and factors >= 1");
  Rng rng(req.seed);

  DenseMatrix f = DenseMatrix::Zero(assets, factors);
  for (Index j = 0; j < factors; ++j)
    for (Index i = 0; i < assets; ++i) {
      const double keep = rng.uniform(0.0, 1.0);
      const double value = rng.normal();
      if (keep < 0.5) f(i, j) = value;
    }
  Vector d(assets);
  for (Index i = 0; i < assets; ++i) d(i) = rng.uniform(0.0, std::sqrt(static_cast<double>(factors)));
  const Vector mu = rng.normal_vector(assets);

  // Covariance F F' + D; the risk aversion is folded into the return term.
  ConicProblem p;
  p.P = 2.0 * (f * f.transpose());
  p.P.diagonal() += 2.0 * d;
  mirror_upper(p.P);
  p.q = -mu;
  p.A = DenseMatrix::Zero(assets + 1, assets);
  p.A.row(0).setOnes();
  p.A.bottomRows(assets) = -DenseMatrix::Identity(assets, assets);
  p.b = Vector::Zero(assets + 1);
  p.b(0) = 1.0;
  p.cones = {ConeBlock::zero(1), ConeBlock::nonneg(assets)};
  return p;
}

ConicProblem lasso(const GenerateRequest& req) {
  const Index features = size_at(req, 0, 20);
  const Index samples = size_at(req, 1, 50);
  require(features >= 1 && samples >= 1, "lasso needs positive sizes");
  Rng rng(req.seed);

  const DenseMatrix data = rng.normal_matrix(samples, features);
  Vector truth = Vector::Zero(features);
  for (Index i = 0; i < features; ++i) {
    if (rng.uniform(0.0, 1.0) < 0.5) truth(i) = rng.normal() / std::sqrt(static_cast<double>(features));
  }
  const Vector obs = data * truth + rng.normal_vector(samples);
  const double lambda = 0.2 * (data.transpose() * obs).cwiseAbs().maxCoeff();

  // Variables (x, y, t): min 1/2 y'y + lambda 1't, data x - y = obs, -t <= x <= t.
  const Index n = 2 * features + samples;
  ConicProblem p;
  p.P = DenseMatrix::Zero(n, n);
  p.P.block(features, features, samples, samples).setIdentity();
  p.q = Vector::Zero(n);
  p.q.tail(features).setConstant(lambda);
  const Index m = samples + 2 * features;
  p.A = DenseMatrix::Zero(m, n);
  p.A.block(0, 0, samples, features) = data;
  p.A.block(0, features, samples, samples) = -DenseMatrix::Identity(samples, samples);
  const DenseMatrix eye = DenseMatrix::Identity(features, features);
  p.A.block(samples, 0, features, features) = eye;
  p.A.block(samples, features + samples, features, features) = -eye;
  p.A.block(samples + features, 0, features, features) = -eye;
  p.A.block(samples + features, features + samples, features, features) = -eye;
  p.b = Vector::Zero(m);
  p.b.head(samples) = obs;
  p.cones = {ConeBlock::zero(samples), ConeBlock::nonneg(2 * features)};
  return p;
}

ConicProblem random_sdp(const GenerateRequest& req) {
  const Index side = size_at(req, 0, 10);
  const Index vars = size_at(req, 1, 5);
  require(side >= 1 && vars >= 1, "random_sdp needs positive sizes");
  Rng rng(req.seed);
  const Index dim = side * (side + 1) / 2;

  ConicProblem p;
  p.A.resize(dim, vars);
  for (Index j = 0; j < vars; ++j) {
    const DenseMatrix g = rng.normal_matrix(side, side);
    p.A.col(j) = conic::matrix_to_svec(0.5 * (g + g.transpose()));
  }
  const Vector x0 = rng.normal_vector(vars);
  const DenseMatrix w = rng.normal_matrix(side, std::max<Index>(1, side / 2));
  const DenseMatrix s0 = w * w.transpose();
  p.b = p.A * x0 + conic::matrix_to_svec(s0);

  // Strictly feasible dual point makes the problem bounded.
  const DenseMatrix z = rng.normal_matrix(side, side);
  const DenseMatrix y0 = z * z.transpose() / static_cast<double>(side) + DenseMatrix::Identity(side, side);
  p.q = -(p.A.transpose() * conic::matrix_to_svec(y0));
  p.P = DenseMatrix::Zero(vars, vars);
  p.cones = {ConeBlock::psd_triangle(side)};
  return p;
}

ConicProblem infeasible_lp(const GenerateRequest& req) {
  const Index n = size_at(req, 0, 10);
  require(n >= 1, "infeasible_lp needs n >= 1");
  Rng rng(req.seed);

  // x_0 <= -1 and -x_0 <= -1 contradict. The other variables are boxed so
  // that no recession direction exists and the problem is not also unbounded.
  const Index rows = 2 * n;
  ConicProblem p;
  p.P = DenseMatrix::Zero(n, n);
  p.q = rng.normal_vector(n);
  p.A = DenseMatrix::Zero(rows, n);
  p.b = Vector::Zero(rows);
  p.A(0, 0) = 1.0;
  p.b(0) = -1.0;
  p.A(1, 0) = -1.0;
  p.b(1) = -1.0;
  for (Index i = 1; i < n; ++i) {
    p.A(2 * i, i) = 1.0;
    p.b(2 * i) = 1.0 + rng.uniform(0.0, 1.0);
    p.A(2 * i + 1, i) = -1.0;
    p.b(2 * i + 1) = 1.0 + rng.uniform(0.0, 1.0);
  }
  p.cones = {ConeBlock::nonneg(rows)};
  return p;
}

ConicProblem unbounded_lp(const GenerateRequest& req) {
  const Index n = size_at(req, 0, 10);
  require(n >= 1, "unbounded_lp needs n >= 1");
  Rng rng(req.seed);

  // minimize -x_0 + (bounded terms) over x >= 0: the ray e_0 is a descent direction.
  ConicProblem p;
  p.P = DenseMatrix::Identity(n, n);
  p.P(0, 0) = 0.0;
  p.q = rng.normal_vector(n);
  p.q(0) = -1.0;
  p.A = -DenseMatrix::Identity(n, n);
  p.b = Vector::Zero(n);
  p.cones = {ConeBlock::nonneg(n)};
  return p;
}

}  // namespace

const char* to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::RandomQP: return "random_qp";
    case ProblemKind::Portfolio: return "portfolio";
    case ProblemKind::Lasso: return "lasso";
    case ProblemKind::RandomSDP: return "random_sdp";
    case ProblemKind::InfeasibleLP: return "infeasible_lp";
    case ProblemKind::UnboundedLP: return "unbounded_lp";
  }
  return "unknown";
}

ProblemKind parse_kind(const std::string& name) {
  for (auto kind : {ProblemKind::RandomQP, ProblemKind::Portfolio, ProblemKind::Lasso,
                    ProblemKind::RandomSDP, ProblemKind::InfeasibleLP, ProblemKind::UnboundedLP}) {
    if (name == to_string(kind)) return kind;
  }
  throw InvalidParams("unknown problem kind '" + name + "'");
}

std::string GenerateRequest::name() const {
  std::ostringstream os;
  os << to_string(kind);
  for (std::size_t i = 0; i < sizes.size(); ++i) os << (i == 0 ? "_" : "x") << sizes[i];
  os << "_s" << seed;
  return os.str();
}

ConicProblem generate(const GenerateRequest& request) {
  for (Index s : request.sizes) require(s > 0, "sizes must be positive");
  switch (request.kind) {
    case ProblemKind::RandomQP: return random_qp(request);
    case ProblemKind::Portfolio: return portfolio(request);
    case ProblemKind::Lasso: return lasso(request);
    case ProblemKind::RandomSDP: return random_sdp(request);
    case ProblemKind::InfeasibleLP: return infeasible_lp(request);
    case ProblemKind::UnboundedLP: return unbounded_lp(request);
  }
  throw InvalidParams("unknown problem kind");
}

std::vector<GenerateRequest> parse_generate_spec(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.size() != 3) throw InvalidParams("generate spec must look like kind:AxB:seed, got '" + spec + "'");

  GenerateRequest base;
  base.kind = parse_kind(parts[0]);
  std::stringstream sizes(parts[1]);
  for (std::string item; std::getline(sizes, item, 'x');) {
    try {
      base.sizes.push_back(std::stoll(item));
    } catch (const std::exception&) {
      throw InvalidParams("bad size '" + item + "' in '" + spec + "'");
    }
  }

  std::uint64_t first = 0;
  std::uint64_t last = 0;
  try {
    const auto dash = parts[2].find('-');
    first = std::stoull(parts[2].substr(0, dash));
    last = dash == std::string::npos ? first : std::stoull(parts[2].substr(dash + 1));
  } catch (const std::exception&) {
    throw InvalidParams("bad seed '" + parts[2] + "' in '" + spec + "'");
  }
  if (last < first) throw InvalidParams("empty seed range in '" + spec + "'");

  std::vector<GenerateRequest> out;
  for (std::uint64_t s = first; s <= last; ++s) {
    GenerateRequest r = base;
    r.seed = s;
    out.push_back(r);
  }
  return out;
}

}  // namespace safeaa::bench
