#include "eulerlab/singular.hpp"

#include <Eigen/QR>
#include <Eigen/SparseCholesky>
#include <array>
#include <random>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace eulerlab {

Subdomain Subdomain::half_ball(Vec2 c, double r, Vec2 axis) {
  const double len = norm(axis);
  require(len > 0.0, "half_ball: axis must be nonzero");
  return {SubdomainKind::HalfBall, c, r, (1.0 / len) * axis, 0.0};
}

Subdomain Subdomain::cap(Vec2 dir, double lambda) {
  const double len = norm(dir);
  require(len > 0.0, "cap: direction must be nonzero");
  return {SubdomainKind::Cap, {}, 0.0, (1.0 / len) * dir, lambda};
}

bool Subdomain::contains(Vec2 p) const {
  switch (kind) {
    case SubdomainKind::All:
      return true;
    case SubdomainKind::Ball:
      return norm(p - center) < radius;
    case SubdomainKind::HalfBall:
      return norm(p - center) < radius && dot(p - center, direction) > 0.0;
    case SubdomainKind::Cap:
      return dot(p, direction) > offset;
  }
  return false;
}

std::vector<std::size_t> subdomain_nodes(const DomainMask& mask, const Subdomain& sub) {
  const Grid2& g = mask.grid;
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < g.size(); ++k)
    if (mask.inside[k] && mask.distance[k] >= 0.5 * g.h && sub.contains(g.node(k))) out.push_back(k);
  return out;
}

SingularPotential make_potential(ScalarField c, const DomainMask& mask) {
  require_same_grid(c.grid, mask.grid, "make_potential");
  SingularPotential p;
  for (std::size_t k = 0; k < c.values.size(); ++k)
    if (mask.inside[k] && std::isfinite(c[k])) p.bound = std::max(p.bound, std::abs(c[k]) * mask.distance[k]);
  p.c = std::move(c);
  return p;
}

SingularPotential potential_from_distance(const DomainMask& mask, const std::function<double(double)>& fn) {
  ScalarField c(mask.grid);
  for (std::size_t k = 0; k < c.values.size(); ++k)
    if (mask.inside[k]) c[k] = fn(mask.distance[k]);
  return make_potential(std::move(c), mask);
}

ScalarField DiscreteOperator::to_field(const Eigen::VectorXd& x) const {
  require(static_cast<std::size_t>(x.size()) == nodes.size(), "to_field: size mismatch");
  ScalarField f(grid);
  for (std::size_t u = 0; u < nodes.size(); ++u) f[nodes[u]] = x[static_cast<Eigen::Index>(u)];
  return f;
}

Eigen::VectorXd DiscreteOperator::from_field(const ScalarField& f) const {
  require_same_grid(f.grid, grid, "from_field");
  Eigen::VectorXd x(static_cast<Eigen::Index>(nodes.size()));
  for (std::size_t u = 0; u < nodes.size(); ++u) x[static_cast<Eigen::Index>(u)] = f[nodes[u]];
  return x;
}

DiscreteOperator assemble(const DomainMask& mask, const std::vector<std::size_t>& nodes, const SingularPotential& c) {
  require_same_grid(mask.grid, c.c.grid, "assemble");
  if (nodes.empty()) fail(ErrorKind::InvalidArgument, "assemble: empty subdomain");
  const Grid2& g = mask.grid;
  DiscreteOperator op;
  op.grid = g;
  op.nodes = nodes;
  op.unknown.assign(g.size(), -1);
  for (std::size_t u = 0; u < nodes.size(); ++u) {
    const std::size_t k = nodes[u];
    require(k < g.size(), "assemble: node index out of range");
    if (!mask.inside[k] || !(mask.distance[k] > 0.0) || !std::isfinite(c.c[k])) {
      const Vec2 p = g.node(k);
      fail(ErrorKind::SingularNode, "assemble: node (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                                        ") lies on the boundary or carries a non-finite potential");
    }
    op.unknown[k] = static_cast<int>(u);
  }
  const double inv_h2 = 1.0 / (g.h * g.h);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(5 * nodes.size());
  op.c.resize(nodes.size());
  for (std::size_t u = 0; u < nodes.size(); ++u) {
    const std::size_t k = nodes[u];
    const int i = static_cast<int>(k % static_cast<std::size_t>(g.nx));
    const int j = static_cast<int>(k / static_cast<std::size_t>(g.nx));
    op.c[u] = c.c[k];
    trip.emplace_back(u, u, 4.0 * inv_h2 + c.c[k]);
    const int nb[4][2] = {{i + 1, j}, {i - 1, j}, {i, j + 1}, {i, j - 1}};
    for (const auto& q : nb) {
      if (q[0] < 0 || q[1] < 0 || q[0] >= g.nx || q[1] >= g.ny) continue;
      const int v = op.unknown[g.index(q[0], q[1])];
      if (v >= 0) trip.emplace_back(u, v, -inv_h2);
    }
  }
  const auto n = static_cast<Eigen::Index>(nodes.size());
  op.matrix.resize(n, n);
  op.matrix.setFromTriplets(trip.begin(), trip.end());
  op.matrix.makeCompressed();
  return op;
}

DiscreteOperator assemble(const DomainMask& mask, const Subdomain& sub, const SingularPotential& c) {
  return assemble(mask, subdomain_nodes(mask, sub), c);
}

namespace {

double inf_norm(const SparseMatrix& a) {
  Eigen::VectorXd rows = Eigen::VectorXd::Zero(a.rows());
  for (Eigen::Index k = 0; k < a.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) rows[it.row()] += std::abs(it.value());
  return rows.maxCoeff();
}

double gershgorin_floor(const SparseMatrix& a) {
  Eigen::VectorXd lo = Eigen::VectorXd::Zero(a.rows());
  for (Eigen::Index k = 0; k < a.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(a, k); it; ++it)
      lo[it.row()] += it.row() == it.col() ? it.value() : -std::abs(it.value());
  return lo.minCoeff();
}

void orthogonalize(Eigen::VectorXd& x, const Eigen::VectorXd* d) {
  if (d) x -= d->dot(x) * (*d);
}

}  // namespace

SymmetricEigenpair smallest_eigenpair(const SparseMatrix& a, const EigenOptions& opt, const Eigen::VectorXd* deflate) {
  const Eigen::Index n = a.rows();
  require(n > 0 && a.cols() == n, "smallest_eigenpair: matrix must be square and nonempty");
  Eigen::VectorXd dvec;
  if (deflate) {
    require(deflate->size() == n, "smallest_eigenpair: deflation vector has the wrong size");
    dvec = deflate->normalized();
  }
  const Eigen::VectorXd* d = deflate ? &dvec : nullptr;
  const int allowed_below = deflate ? 1 : 0;
  const double anorm = std::max(inf_norm(a), 1e-300);

  SymmetricEigenpair out;
  SparseMatrix shifted = a;
  SparseMatrix ident(n, n);
  ident.setIdentity();
  Eigen::SimplicialLDLT<SparseMatrix> ldlt;
  ldlt.analyzePattern(shifted + 0.0 * ident);
  // Factorizes a - s I; accepted when the inertia shows at most `allowed_below`
  // eigenvalues below s.
  auto factor_at = [&](double s) {
    shifted = a - s * ident;
    ldlt.factorize(shifted);
    ++out.factorizations;
    if (ldlt.info() != Eigen::Success) return false;
    const Eigen::VectorXd& piv = ldlt.vectorD();
    int negative = 0;
    for (Eigen::Index k = 0; k < piv.size(); ++k) {
      if (piv[k] == 0.0 || !std::isfinite(piv[k])) return false;
      if (piv[k] < 0.0) ++negative;
    }
    return negative <= allowed_below;
  };

  const double floor = gershgorin_floor(a);
  double s = floor - 1e-3 * (1.0 + std::abs(floor));
  if (!factor_at(s)) {
    s = floor - 1.0 - std::abs(floor);
    if (!factor_at(s)) fail(ErrorKind::ConvergenceFailure, "smallest_eigenpair: could not factor below the spectrum");
  }

  // All ones for the principal pair. With deflation a symmetric start vector can
  // miss a whole symmetry class of eigenvectors, so a fixed-seed random one is used.
  Eigen::VectorXd x = Eigen::VectorXd::Ones(n);
  if (d) {
    std::mt19937_64 rng(0x5eed);
    std::uniform_real_distribution<double> unit(0.5, 1.5);
    for (Eigen::Index k = 0; k < n; ++k) x[k] = unit(rng);
    orthogonalize(x, d);
  }
  x.normalize();
  double upper = x.dot(a * x);

  for (int it = 1; it <= opt.max_iter; ++it) {
    Eigen::VectorXd y = ldlt.solve(x);
    orthogonalize(y, d);
    const double yn = y.norm();
    if (!(yn > 0.0) || !std::isfinite(yn)) fail(ErrorKind::ConvergenceFailure, "smallest_eigenpair: iteration broke down");
    x = y / yn;
    const Eigen::VectorXd ax = a * x;
    const double mu = x.dot(ax);
    const Eigen::VectorXd r = ax - mu * x;
    const double rn = r.norm();
    out.lambda = mu;
    out.residual = rn / anorm;
    out.iterations = it;
    if (out.residual <= opt.residual_tol) {
      if (x.sum() < 0.0) x = -x;
      out.x = x;
      return out;
    }
    upper = std::min(upper, mu);
    const double candidate = std::min(upper, std::max(mu - 2.0 * rn, 0.5 * (s + upper)));
    if (candidate > s + 1e-14 * anorm) {
      if (factor_at(candidate)) {
        s = candidate;
      } else {
        upper = std::min(upper, candidate);
        if (!factor_at(s)) fail(ErrorKind::ConvergenceFailure, "smallest_eigenpair: lost the factorization");
      }
    }
  }
  fail(ErrorKind::ConvergenceFailure, "smallest_eigenpair: no convergence after " + std::to_string(opt.max_iter) +
                                          " iterations (residual " + std::to_string(out.residual) + ")");
}

namespace {

Eigenpair to_eigenpair(const DiscreteOperator& op, const SymmetricEigenpair& e) {
  Eigenpair out;
  out.lambda = e.lambda;
  out.residual = e.residual;
  out.iterations = e.iterations;
  out.phi = op.to_field(e.x / op.grid.h);
  return out;
}

}  // namespace

Eigenpair principal_eigenpair(const DiscreteOperator& op, const EigenOptions& opt) {
  return to_eigenpair(op, smallest_eigenpair(op.matrix, opt));
}

Eigenpair second_eigenpair(const DiscreteOperator& op, const Eigenpair& first, const EigenOptions& opt) {
  const Eigen::VectorXd d = op.from_field(first.phi);
  return to_eigenpair(op, smallest_eigenpair(op.matrix, opt, &d));
}

double rayleigh_quotient(const DiscreteOperator& op, const ScalarField& psi) {
  const Eigen::VectorXd x = op.from_field(psi);
  const double nn = x.squaredNorm();
  require(nn > 0.0, "rayleigh_quotient: zero function");
  return x.dot(op.matrix * x) / nn;
}

HardyResult hardy_ratio(const DomainMask& mask, const Subdomain& sub) {
  const DiscreteOperator op = assemble(mask, sub, make_potential(ScalarField(mask.grid), mask));
  Eigen::VectorXd dist(static_cast<Eigen::Index>(op.size()));
  for (std::size_t u = 0; u < op.size(); ++u) dist[static_cast<Eigen::Index>(u)] = mask.distance[op.nodes[u]];
  const SparseMatrix b = dist.asDiagonal() * op.matrix * dist.asDiagonal();
  const SymmetricEigenpair e = smallest_eigenpair(b);
  return {e.lambda, op.size(), e.residual};
}

PositivityResult positivity_radius(const DomainMask& mask, const SingularPotential& c, Vec2 q,
                                   std::optional<double> r_max) {
  const Grid2& g = mask.grid;
  const double hi_default = std::hypot(g.x_max() - g.x0, g.y_max() - g.y0);
  double hi = r_max.value_or(hi_default);
  double lo = 4.0 * g.h;
  require(hi >= lo, "positivity_radius: r_max below 4h");
  PositivityResult out;
  auto lambda_at = [&](double r) {
    ++out.evaluations;
    const auto nodes = subdomain_nodes(mask, Subdomain::ball(q, r));
    if (nodes.empty()) fail(ErrorKind::InvalidArgument, "positivity_radius: ball holds no interior node");
    return principal_eigenpair(assemble(mask, nodes, c)).lambda;
  };
  double lam_lo = lambda_at(lo);
  if (!(lam_lo > 0.0)) {
    out.radius = 0.0;
    out.lambda1 = lam_lo;
    out.positive = false;
    return out;
  }
  const double lam_hi = lambda_at(hi);
  if (lam_hi > 0.0) {
    out.radius = hi;
    out.lambda1 = lam_hi;
    return out;
  }
  while (hi - lo > 0.5 * g.h) {
    const double mid = 0.5 * (lo + hi);
    const double lam = lambda_at(mid);
    if (lam > 0.0) {
      lo = mid;
      lam_lo = lam;
    } else {
      hi = mid;
    }
  }
  out.radius = lo;
  out.lambda1 = lam_lo;
  return out;
}

ScalarField solve(const DiscreteOperator& op, const ScalarField& rhs) {
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(op.matrix);
  if (ldlt.info() != Eigen::Success) fail(ErrorKind::ConvergenceFailure, "solve: factorization failed");
  return op.to_field(ldlt.solve(op.from_field(rhs)));
}

MaxPrincipleVerdict weak_max_principle_check(const DiscreteOperator& op, const ScalarField& omega, double tol,
                                             std::optional<double> lambda1) {
  require_same_grid(op.grid, omega.grid, "weak_max_principle_check");
  require(tol > 0.0, "weak_max_principle_check: tol must be positive");
  const Grid2& g = op.grid;
  MaxPrincipleVerdict v;
  v.lambda1 = lambda1 ? *lambda1 : principal_eigenpair(op).lambda;
  if (!(v.lambda1 > 0.0)) {
    v.kind = MaxPrincipleKind::HypothesesFail;
    v.reason = "lambda_1 <= 0";
    return v;
  }
  double max_c = 0.0, max_w = 0.0;
  for (std::size_t u = 0; u < op.size(); ++u) {
    max_c = std::max(max_c, std::abs(op.c[u]));
    max_w = std::max(max_w, std::abs(omega[op.nodes[u]]));
  }
  v.scale = (1.0 + max_c) * max_w;
  v.min_L_omega = INFINITY;
  v.min_boundary = INFINITY;
  v.min_omega = INFINITY;
  Vec2 worst_l{}, worst_b{};
  const double inv_h2 = 1.0 / (g.h * g.h);
  for (std::size_t u = 0; u < op.size(); ++u) {
    const std::size_t k = op.nodes[u];
    const int i = static_cast<int>(k % static_cast<std::size_t>(g.nx));
    const int j = static_cast<int>(k / static_cast<std::size_t>(g.nx));
    v.min_omega = std::min(v.min_omega, omega[k]);
    double lap = -4.0 * omega[k];
    const int nb[4][2] = {{i + 1, j}, {i - 1, j}, {i, j + 1}, {i, j - 1}};
    for (const auto& q : nb) {
      if (q[0] < 0 || q[1] < 0 || q[0] >= g.nx || q[1] >= g.ny) continue;
      const std::size_t kn = g.index(q[0], q[1]);
      lap += omega[kn];
      if (op.unknown[kn] < 0 && omega[kn] < v.min_boundary) {
        v.min_boundary = omega[kn];
        worst_b = g.node(kn);
      }
    }
    const double lw = -lap * inv_h2 + op.c[u] * omega[k];
    const double rel = v.scale > 0.0 ? lw / v.scale : lw;
    if (rel < v.min_L_omega) {
      v.min_L_omega = rel;
      worst_l = g.node(k);
    }
  }
  if (!std::isfinite(v.min_boundary)) v.min_boundary = 0.0;
  if (v.min_L_omega < -tol) {
    v.kind = MaxPrincipleKind::HypothesesFail;
    v.violation = worst_l;
    v.reason = "L omega < 0";
  } else if (v.min_boundary < -tol * max_w) {
    v.kind = MaxPrincipleKind::HypothesesFail;
    v.violation = worst_b;
    v.reason = "omega < 0 on the boundary";
  } else {
    v.kind = MaxPrincipleKind::HypothesesHold;
  }
  return v;
}

double ComparisonProfile::rho(double t) const {
  const double s = r - t;
  return s + a(t) * s * s / 2.0;
}

double ComparisonProfile::drho(double t) const {
  const double s = r - t;
  const double da = -(m - 1) / (t * t);
  return -1.0 + da * s * s / 2.0 - a(t) * s;
}

double ComparisonProfile::d2rho(double t) const {
  const double s = r - t;
  const double da = -(m - 1) / (t * t);
  const double d2a = 2.0 * (m - 1) / (t * t * t);
  return d2a * s * s / 2.0 - 2.0 * da * s + a(t);
}

double ComparisonProfile::rho_over_gap(double t) const { return 1.0 + a(t) * (r - t) / 2.0; }

double ComparisonProfile::induced_c(double t) const {
  return (d2rho(t) + (m - 1) * drho(t) / t) / rho_over_gap(t);
}

double ComparisonProfile::residual(double t) const {
  return -d2rho(t) - (m - 1) * drho(t) / t + C * rho_over_gap(t);
}

ComparisonProfile comparison_profile(int m, double C, double r) {
  if (m < 2 || !(C > 0.0) || !(r > 0.0))
    fail(ErrorKind::InvalidArgument, "comparison_profile: need m >= 2, C > 0, r > 0");
  ComparisonProfile p{m, C, r, 0.0};
  constexpr int kSamples = 10000;
  const double lo = 0.01 * r;
  const double step = (r - lo) / kSamples;
  auto ok = [&](double t) { return p.induced_c(t) > C && p.rho(t) > 0.0; };
  int bad = -1;
  for (int k = 1; k <= kSamples; ++k)
    if (!ok(r - k * step)) {
      bad = k;
      break;
    }
  if (bad == 1) fail(ErrorKind::ProfileFailure, "comparison_profile: induced coefficient not above C next to r");
  if (bad < 0) {
    p.r0 = lo;
    return p;
  }
  double good_t = r - (bad - 1) * step, bad_t = r - bad * step;
  for (int it = 0; it < 100 && good_t - bad_t > 1e-15 * r; ++it) {
    const double mid = 0.5 * (good_t + bad_t);
    (ok(mid) ? good_t : bad_t) = mid;
  }
  p.r0 = good_t;
  return p;
}

PsiField::PsiField(const ComparisonProfile& profile, int which, int dimension)
    : p_(profile), which_(which), n_(dimension) {
  require(which == 1 || which == 2, "PsiField: which must be 1 or 2");
  require(dimension >= 1, "PsiField: dimension must be positive");
  const int want = which == 1 ? dimension : dimension + 2;
  if (profile.m != want)
    fail(ErrorKind::InvalidArgument, "PsiField: profile m = " + std::to_string(profile.m) + " does not match psi_" +
                                         std::to_string(which) + " in dimension " + std::to_string(dimension));
}

namespace {

double radius_of(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

}  // namespace

void PsiField::check_domain(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != n_) fail(ErrorKind::InvalidArgument, "PsiField: point has the wrong dimension");
  const double t = radius_of(x);
  const double slack = 1e-12 * p_.r;
  if (t < p_.r0 - slack || t > p_.r + slack) fail(ErrorKind::DomainError, "PsiField: |x| outside [r0, r]");
  if (which_ == 2 && x[0] < 0.0) fail(ErrorKind::DomainError, "PsiField: psi_2 needs x_1 >= 0");
}

double PsiField::extended_value(std::span<const double> x) const {
  const double t = radius_of(x);
  return which_ == 1 ? p_.rho(t) : x[0] * p_.rho(t);
}

double PsiField::value(std::span<const double> x) const {
  check_domain(x);
  return extended_value(x);
}

std::vector<double> PsiField::gradient(std::span<const double> x) const {
  check_domain(x);
  const double t = radius_of(x);
  const double g1 = p_.drho(t);
  std::vector<double> out(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = (which_ == 1 ? 1.0 : x[0]) * g1 * x[k] / t;
  if (which_ == 2) out[0] += p_.rho(t);
  return out;
}

double PsiField::laplacian(std::span<const double> x) const {
  check_domain(x);
  const double t = radius_of(x);
  const double radial = p_.d2rho(t) + (p_.m - 1) * p_.drho(t) / t;
  return which_ == 1 ? radial : x[0] * radial;
}

Eigen::MatrixXd PsiField::hessian(std::span<const double> x) const {
  check_domain(x);
  const double t = radius_of(x);
  const double g1 = p_.drho(t), g2 = p_.d2rho(t);
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd hs(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < n; ++k) {
      const double xj = x[static_cast<std::size_t>(j)], xk = x[static_cast<std::size_t>(k)];
      const double radial = g2 * xj * xk / (t * t) + g1 * ((j == k ? 1.0 : 0.0) / t - xj * xk / (t * t * t));
      hs(j, k) = which_ == 1 ? radial : x[0] * radial;
      if (which_ == 2) {
        if (j == 0) hs(j, k) += g1 * xk / t;
        if (k == 0) hs(j, k) += g1 * xj / t;
      }
    }
  return hs;
}

double PsiField::residual(std::span<const double> x) const {
  check_domain(x);
  const double t = radius_of(x);
  return which_ == 1 ? p_.residual(t) : x[0] * p_.residual(t);
}

double corner_second_derivative(const PsiField& psi2, std::span<const double> p, std::span<const double> eta) {
  require(p.size() == eta.size(), "corner_second_derivative: dimension mismatch");
  const Eigen::MatrixXd hs = psi2.hessian(p);
  const Eigen::Map<const Eigen::VectorXd> e(eta.data(), static_cast<Eigen::Index>(eta.size()));
  return e.dot(hs * e) / e.squaredNorm();
}

std::string to_string(CheckVerdict v) {
  switch (v) {
    case CheckVerdict::StrictlyNegative: return "strictly-negative";
    case CheckVerdict::StrictlyPositive: return "strictly-positive";
    case CheckVerdict::IdenticallyZero: return "identically-zero";
    case CheckVerdict::Inconclusive: return "inconclusive";
    case CheckVerdict::HypothesesFail: return "hypotheses-fail";
  }
  return "unknown";
}

namespace {

struct BallStats {
  double max_abs = 0.0;
  double min_value = INFINITY;
};

template <class In>
BallStats ball_stats(const ScalarField& omega, In&& in) {
  BallStats s;
  const Grid2& g = omega.grid;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!in(g.node(k))) continue;
    s.max_abs = std::max(s.max_abs, std::abs(omega[k]));
    s.min_value = std::min(s.min_value, omega[k]);
  }
  if (!std::isfinite(s.min_value)) s.min_value = 0.0;
  return s;
}

}  // namespace

BoundaryCheck hopf_check(const ScalarField& omega, const DomainMask& mask, Vec2 center, double r, Vec2 p,
                         CheckTolerances tol) {
  require_same_grid(omega.grid, mask.grid, "hopf_check");
  const Grid2& g = omega.grid;
  if (!(r > 2.0 * g.h)) fail(ErrorKind::InvalidArgument, "hopf_check: radius must exceed 2h");
  if (!mask.contains(center) || mask.distance_at(center) < r - g.h)
    fail(ErrorKind::InvalidArgument, "hopf_check: ball is not contained in the domain");
  if (std::abs(norm(p - center) - r) > g.h) fail(ErrorKind::InvalidArgument, "hopf_check: p is not on the sphere");
  const Vec2 inward = (1.0 / norm(center - p)) * (center - p);
  const BallStats st = ball_stats(omega, [&](Vec2 x) { return norm(x - center) <= r; });
  BoundaryCheck out;
  out.max_abs = st.max_abs;
  out.value_at_p = omega.sample(p);
  const double g0 = out.value_at_p, g1 = omega.sample(p + g.h * inward), g2 = omega.sample(p + 2.0 * g.h * inward);
  out.derivative = -(-3.0 * g0 + 4.0 * g1 - g2) / (2.0 * g.h);
  if (st.max_abs < tol.value) {
    out.verdict = CheckVerdict::IdenticallyZero;
    return out;
  }
  const double slack = std::max(tol.value, g.h * g.h * st.max_abs / (r * r) * 10.0);
  if (st.min_value < -slack || std::abs(out.value_at_p) > std::max(tol.value, g.h * st.max_abs / r)) {
    out.verdict = CheckVerdict::HypothesesFail;
    out.reason = st.min_value < -slack ? "omega is negative in the ball" : "omega(p) is not zero";
    return out;
  }
  const double dtol = tol.derivative > 0.0 ? tol.derivative : 10.0 * g.h * st.max_abs;
  out.verdict = out.derivative < -dtol ? CheckVerdict::StrictlyNegative : CheckVerdict::Inconclusive;
  return out;
}

BoundaryCheck corner_check(const ScalarField& omega, const DomainMask& mask, Vec2 center, double r, Vec2 axis,
                           Vec2 p, Vec2 eta, CheckTolerances tol) {
  require_same_grid(omega.grid, mask.grid, "corner_check");
  const Grid2& g = omega.grid;
  const double an = norm(axis), en = norm(eta);
  require(an > 0.0 && en > 0.0, "corner_check: axis and eta must be nonzero");
  axis = (1.0 / an) * axis;
  eta = (1.0 / en) * eta;
  if (!(dot(eta, axis) > 0.0) || !(dot(p - center, eta) < 0.0))
    fail(ErrorKind::InvalidArgument, "corner_check: eta must enter the half ball (eta . axis > 0, (p - c) . eta < 0)");
  if (std::abs(dot(p - center, axis)) > g.h || std::abs(norm(p - center) - r) > g.h)
    fail(ErrorKind::InvalidArgument, "corner_check: p is not a corner of the half ball");
  auto in_half = [&](Vec2 x) { return norm(x - center) <= r && dot(x - center, axis) >= 0.0; };
  const BallStats st = ball_stats(omega, in_half);
  BoundaryCheck out;
  out.max_abs = st.max_abs;
  out.value_at_p = omega.sample(p);

  // Cubic least squares on the half-ball nodes within 6h of p.
  std::vector<std::array<double, 10>> rows;
  std::vector<double> rhs;
  const int i0 = static_cast<int>(std::floor((p.x - g.x0) / g.h)), j0 = static_cast<int>(std::floor((p.y - g.y0) / g.h));
  for (int j = j0 - 7; j <= j0 + 7; ++j)
    for (int i = i0 - 7; i <= i0 + 7; ++i) {
      if (i < 0 || j < 0 || i >= g.nx || j >= g.ny) continue;
      const Vec2 x = g.node(i, j);
      if (norm(x - p) > 6.0 * g.h || !in_half(x)) continue;
      const Vec2 d = (1.0 / g.h) * (x - p);
      rows.push_back({1.0, d.x, d.y, 0.5 * d.x * d.x, d.x * d.y, 0.5 * d.y * d.y, d.x * d.x * d.x, d.x * d.x * d.y,
                      d.x * d.y * d.y, d.y * d.y * d.y});
      rhs.push_back(omega(i, j));
    }
  if (rows.size() < 15) fail(ErrorKind::InvalidArgument, "corner_check: too few nodes near p");
  Eigen::MatrixXd A(static_cast<Eigen::Index>(rows.size()), 10);
  Eigen::VectorXd b(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    for (int c = 0; c < 10; ++c) A(static_cast<Eigen::Index>(k), c) = rows[k][static_cast<std::size_t>(c)];
    b[static_cast<Eigen::Index>(k)] = rhs[k];
  }
  const Eigen::VectorXd coef = A.colPivHouseholderQr().solve(b);
  const double inv_h = 1.0 / g.h, inv_h2 = inv_h * inv_h;
  out.gradient_norm = std::hypot(coef[1], coef[2]) * inv_h;
  out.derivative = (coef[3] * eta.x * eta.x + 2.0 * coef[4] * eta.x * eta.y + coef[5] * eta.y * eta.y) * inv_h2;

  if (st.max_abs < tol.value) {
    out.verdict = CheckVerdict::IdenticallyZero;
    return out;
  }
  const double slack = std::max(tol.value, 10.0 * g.h * g.h * st.max_abs / (r * r));
  if (st.min_value < -slack) {
    out.verdict = CheckVerdict::HypothesesFail;
    out.reason = "omega is negative in the half ball";
    return out;
  }
  if (std::abs(out.value_at_p) > std::max(tol.value, g.h * st.max_abs / r) ||
      out.gradient_norm > std::max(tol.value, 10.0 * g.h * st.max_abs / (r * r))) {
    out.verdict = CheckVerdict::HypothesesFail;
    out.reason = "omega or its gradient does not vanish at p";
    return out;
  }
  const double dtol = tol.derivative > 0.0 ? tol.derivative : 10.0 * g.h * st.max_abs / (r * r);
  out.verdict = out.derivative > dtol ? CheckVerdict::StrictlyPositive : CheckVerdict::Inconclusive;
  return out;
}

std::string export_coordinate(const SparseMatrix& a) {
  std::ostringstream os;
  os.precision(17);
  for (Eigen::Index k = 0; k < a.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) os << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
  return os.str();
}

}  // namespace eulerlab
