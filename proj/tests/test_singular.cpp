#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "eulerlab/errors.hpp"
#include "eulerlab/expr.hpp"
#include "eulerlab/mask.hpp"
#include "eulerlab/singular.hpp"

using namespace eulerlab;

namespace {

template <class F>
void expect_error(ErrorKind kind, F&& fn) {
  bool thrown = false;
  try {
    fn();
  } catch (const Error& e) {
    thrown = true;
    CHECK(e.kind() == kind);
  }
  CHECK(thrown);
}

DomainMask unit_disk(double h) {
  return mask_from_level(disk_level(covering_grid(-1.2, 1.2, -1.2, 1.2, h), {0.0, 0.0}, 1.0));
}

SingularPotential zero_potential(const DomainMask& m) { return make_potential(ScalarField(m.grid), m); }

}  // namespace

TEST_CASE("discrete Dirichlet eigenvalue of the unit square") {
  const double h = 1.0 / 32;
  const Grid2 g = covering_grid(-0.25, 1.25, -0.25, 1.25, h);
  const DomainMask m = mask_from_level(box_level(g, 0.0, 1.0, 0.0, 1.0));
  const DiscreteOperator op = assemble(m, Subdomain::all(), zero_potential(m));
  CHECK(op.size() == 31 * 31);
  const Eigenpair e = principal_eigenpair(op);
  const double s = std::sin(std::numbers::pi * h / 2.0);
  CHECK(e.lambda == doctest::Approx(8.0 * s * s / (h * h)).epsilon(1e-9));
  CHECK(e.residual < 1e-8);
  CHECK(rayleigh_quotient(op, e.phi) == doctest::Approx(e.lambda).epsilon(1e-10));
}

TEST_CASE("unit disk spectrum") {
  const DomainMask m = unit_disk(1.0 / 64);
  const DiscreteOperator op = assemble(m, Subdomain::all(), zero_potential(m));
  const Eigenpair e1 = principal_eigenpair(op);
  CHECK(e1.lambda == doctest::Approx(5.783185962946784).epsilon(0.01));
  double lo = INFINITY;
  for (std::size_t k : op.nodes) lo = std::min(lo, e1.phi[k]);
  CHECK(lo > 0.0);
  const Eigenpair e2 = second_eigenpair(op, e1);
  CHECK(e2.lambda == doctest::Approx(14.681970642123893).epsilon(0.02));
  const DiscreteOperator shifted = assemble(m, Subdomain::all(), make_potential(ScalarField(m.grid, 2.5), m));
  CHECK(principal_eigenpair(shifted).lambda == doctest::Approx(e1.lambda + 2.5).epsilon(1e-10));
}

TEST_CASE("subdomains") {
  const DomainMask m = unit_disk(1.0 / 32);
  const auto all = subdomain_nodes(m, Subdomain::all());
  const auto ball = subdomain_nodes(m, Subdomain::ball({0.0, 0.0}, 0.5));
  const auto half = subdomain_nodes(m, Subdomain::half_ball({0.0, 0.0}, 0.5, {1.0, 0.0}));
  const auto cap = subdomain_nodes(m, Subdomain::cap({0.0, 1.0}, 0.0));
  CHECK(ball.size() < all.size());
  CHECK(half.size() < ball.size());
  CHECK(cap.size() < all.size());
  for (std::size_t k : all) CHECK(m.distance[k] >= 0.5 * m.grid.h);
  // A smaller domain has a larger principal eigenvalue.
  const SingularPotential z = zero_potential(m);
  CHECK(principal_eigenpair(assemble(m, Subdomain::ball({0.0, 0.0}, 0.5), z)).lambda >
        principal_eigenpair(assemble(m, Subdomain::all(), z)).lambda);
}

TEST_CASE("Hardy ratio and singular potentials") {
  const DomainMask m = unit_disk(1.0 / 32);
  const HardyResult hr = hardy_ratio(m, Subdomain::all());
  CHECK(hr.ratio > 0.25);
  CHECK(hr.ratio < 1.0);
  const SingularPotential c = potential_from_distance(m, [](double d) { return -0.2 / d; });
  CHECK(c.bound == doctest::Approx(0.2));
  // kappa below the discrete Hardy ratio keeps the operator positive.
  CHECK(principal_eigenpair(assemble(m, Subdomain::all(), c)).lambda > 0.0);
  const PositivityResult pr = positivity_radius(m, potential_from_distance(m, [](double d) { return -3.0 / d; }),
                                                m.components[0].vertices.front());
  CHECK(pr.positive);
  CHECK(pr.radius > 0.0);
  CHECK(pr.lambda1 > 0.0);
  ScalarField bad(m.grid, 0.0);
  bad[m.grid.nearest({0.0, 0.0})] = INFINITY;
  expect_error(ErrorKind::SingularNode, [&] { assemble(m, Subdomain::all(), make_potential(bad, m)); });
}

TEST_CASE("weak maximum principle") {
  const DomainMask m = unit_disk(1.0 / 32);
  const DiscreteOperator op = assemble(m, Subdomain::all(), zero_potential(m));
  const ScalarField w = solve(op, ScalarField(m.grid, 1.0));
  const MaxPrincipleVerdict ok = weak_max_principle_check(op, w, 1e-8);
  CHECK(ok.kind == MaxPrincipleKind::HypothesesHold);
  ScalarField neg = w;
  for (double& v : neg.values) v = -v;
  CHECK(weak_max_principle_check(op, neg, 1e-8).kind == MaxPrincipleKind::HypothesesFail);
}

TEST_CASE("comparison profile identities") {
  for (int m : {2, 3, 4})
    for (double C : {0.5, 1.0, 5.0})
      for (double r : {0.5, 1.0, 2.0}) {
        const ComparisonProfile p = comparison_profile(m, C, r);
        CHECK(std::abs(p.rho(r)) <= 1e-10);
        CHECK(std::abs(p.drho(r) + 1.0) <= 1e-10);
        CHECK(std::abs(p.d2rho(r) - ((m - 1) / r + 2.0 * C)) <= 1e-10);
        CHECK(p.r0 > 0.0);
        CHECK(p.r0 < r);
        for (int k = 1; k < 100; ++k) {
          const double t = p.r0 + (r - p.r0) * k / 100.0;
          CHECK(p.residual(t) <= 1e-12);
          CHECK(p.rho(t) > 0.0);
        }
      }
  expect_error(ErrorKind::InvalidArgument, [] { comparison_profile(1, 1.0, 1.0); });
  expect_error(ErrorKind::InvalidArgument, [] { comparison_profile(2, -1.0, 1.0); });
}

TEST_CASE("comparison fields") {
  const ComparisonProfile p2 = comparison_profile(2, 1.0, 1.0), p4 = comparison_profile(4, 1.0, 1.0);
  const PsiField psi1(p2, 1, 2), psi2(p4, 2, 2);
  const double x[2] = {0.3, 0.9};
  const auto g = psi2.gradient(x);
  const double d = 1e-6;
  const double xp[2] = {0.3 + d, 0.9}, xm[2] = {0.3 - d, 0.9};
  CHECK(g[0] == doctest::Approx((psi2.value(xp) - psi2.value(xm)) / (2 * d)).epsilon(1e-6));
  CHECK(psi2.laplacian(x) == doctest::Approx(psi2.hessian(x).trace()).epsilon(1e-9));
  const double far[2] = {2.0, 0.0}, left[2] = {-0.5, 0.8};
  expect_error(ErrorKind::DomainError, [&] { psi1.value(far); });
  expect_error(ErrorKind::DomainError, [&] { psi2.value(left); });
  expect_error(ErrorKind::InvalidArgument, [&] { PsiField(p2, 2, 2); });
  // Second derivative at the corner r e_2 along an entering direction.
  const double pc[2] = {0.0, 1.0}, eta[2] = {std::cos(0.5), -std::sin(0.5)};
  const double pe = -std::sin(0.5);
  CHECK(corner_second_derivative(psi2, pc, eta) == doctest::Approx(-2.0 * pe * eta[0]).epsilon(1e-10));
}

TEST_CASE("Hopf and corner checks") {
  const double h = 1.0 / 64;
  const DomainMask m = mask_from_level(disk_level(covering_grid(-2.2, 2.2, -2.2, 2.2, h), {0.0, 0.0}, 2.0));
  const ScalarField bowl = sample_scalar(m.grid, [](Vec2 x) { return 1.0 - dot(x, x); });
  const BoundaryCheck hopf = hopf_check(bowl, m, {0.0, 0.0}, 1.0, {1.0, 0.0});
  CHECK(hopf.verdict == CheckVerdict::StrictlyNegative);
  CHECK(hopf.derivative == doctest::Approx(-2.0).epsilon(0.01));
  const ScalarField zero(m.grid, 0.0);
  CHECK(hopf_check(zero, m, {0.0, 0.0}, 1.0, {1.0, 0.0}).verdict == CheckVerdict::IdenticallyZero);
  const ScalarField tilted = sample_scalar(m.grid, [](Vec2 x) { return x.x; });
  CHECK(hopf_check(tilted, m, {0.0, 0.0}, 1.0, {1.0, 0.0}).verdict == CheckVerdict::HypothesesFail);
  // omega = x_1 (1 - |x|^2): the corner (0, 1) has second derivative -4 (p.eta) eta_1 > 0.
  const ScalarField w = sample_scalar(m.grid, [](Vec2 x) { return x.x * (1.0 - dot(x, x)); });
  const Vec2 eta{std::cos(0.6), -std::sin(0.6)};
  const BoundaryCheck corner = corner_check(w, m, {0.0, 0.0}, 1.0, {1.0, 0.0}, {0.0, 1.0}, eta);
  CHECK(corner.verdict == CheckVerdict::StrictlyPositive);
  CHECK(corner.derivative == doctest::Approx(4.0 * std::sin(0.6) * std::cos(0.6)).epsilon(0.02));
  expect_error(ErrorKind::InvalidArgument, [&] { hopf_check(bowl, m, {0.0, 0.0}, 3.0, {3.0, 0.0}); });
}

TEST_CASE("coordinate export") {
  const DomainMask m = unit_disk(1.0 / 8);
  const DiscreteOperator op = assemble(m, Subdomain::all(), zero_potential(m));
  const std::string text = export_coordinate(op.matrix);
  std::istringstream in(text);
  std::string line;
  long lines = 0;
  while (std::getline(in, line)) {
    long r = -1, c = -1;
    double v = 0.0;
    std::istringstream ls(line);
    CHECK(static_cast<bool>(ls >> r >> c >> v));
    CHECK(r >= 0);
    ++lines;
  }
  CHECK(lines == op.matrix.nonZeros());
}

TEST_CASE("distance expressions") {
  CHECK(DistanceExpression("-(0.5)/d")(2.0) == doctest::Approx(-0.25));
  CHECK(DistanceExpression("1 + 2 * 3")(0.0) == doctest::Approx(7.0));
  CHECK(DistanceExpression("2*(d - 1)/4")(3.0) == doctest::Approx(1.0));
  CHECK(DistanceExpression("-d*-d")(3.0) == doctest::Approx(9.0));
  CHECK(DistanceExpression("1e-2/d")(0.5) == doctest::Approx(0.02));
  for (const char* bad : {"", "1 +", "(d", "x", "d d", "1/"})
    expect_error(ErrorKind::InvalidArgument, [&] { DistanceExpression e(bad); });
}
