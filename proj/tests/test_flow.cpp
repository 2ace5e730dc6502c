#include <doctest.h>

#include <cmath>
#include <numbers>

#include "eulerlab/errors.hpp"
#include "eulerlab/flow.hpp"
#include "eulerlab/kernels.hpp"

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

}  // namespace

TEST_CASE("closed-form example values") {
  CHECK(example::phi(1.5) == doctest::Approx(0.5625));
  CHECK(example::phi(0.3) == 1.0);
  CHECK(example::phi(2.5) == 0.0);
  CHECK(example::phi(1.0) == doctest::Approx(1.0));
  CHECK(example::phi(2.0) == doctest::Approx(0.0));
  CHECK(example::f(0.0) == doctest::Approx(-8.0));
  CHECK(example::f(1.0) == doctest::Approx(4.0));
  CHECK(example::f(0.5625) == doctest::Approx(4.0 * (4.0 * 0.75 + std::sqrt(0.25) - 3.0)));
  CHECK(example::velocity(1.5) == doctest::Approx(-1.0));
  CHECK(example::velocity(1.0) == doctest::Approx(0.0));
  CHECK(example::velocity(2.0) == doctest::Approx(0.0));
}

TEST_CASE("the example solves -lap(phi) = f(phi) on the annulus") {
  for (int k = 1; k < 200; ++k) {
    const double r = 1.0 + k / 200.0;
    CHECK(-example::laplacian(r) == doctest::Approx(example::f(example::phi(r))).epsilon(1e-10));
    // Independent check of the radial derivatives by central differences.
    const double d = 1e-5;
    CHECK(example::dphi(r) == doctest::Approx((example::phi(r + d) - example::phi(r - d)) / (2 * d)).epsilon(1e-7));
    CHECK(example::velocity(r) == doctest::Approx(example::dphi(r) / r).epsilon(1e-12));
  }
  for (int k = 1; k < 100; ++k) {
    const double s = k / 100.0, d = 1e-6;
    CHECK(example::fprime(s) == doctest::Approx((example::f(s + d) - example::f(s - d)) / (2 * d)).epsilon(1e-5));
  }
}

TEST_CASE("radial profiles") {
  const RadialProfile v = example::velocity_profile();
  CHECK(v.inner() == 1.0);
  CHECK(v.outer() == 2.0);
  CHECK(v(0.5) == 0.0);
  CHECK(v(3.0) == 0.0);
  const RadialProfile s = RadialProfile::sampled({0.0, 1.0, 3.0}, {2.0, 4.0, 0.0});
  CHECK(s(0.5) == doctest::Approx(3.0));
  CHECK(s(2.0) == doctest::Approx(2.0));
  expect_error(ErrorKind::InvalidArgument, [] { RadialProfile::sampled({0.0, 0.0}, {1.0, 1.0}); });
  expect_error(ErrorKind::InvalidArgument, [] { RadialProfile(2.0, 1.0, [](double) { return 0.0; }); });
}

TEST_CASE("circular flow from a radial profile") {
  const Grid2 g = covering_grid(-2.5, 2.5, -2.5, 2.5, 0.25);
  const VectorField2 u = circular_flow(example::velocity_profile(), {0.0, 0.0}, g);
  const Vec2 at = u[g.nearest({1.5, 0.0})];
  CHECK(at.x == doctest::Approx(0.0));
  CHECK(at.y == doctest::Approx(-1.5));
  CHECK(norm(u[g.nearest({0.0, 0.0})]) == 0.0);
  const Grid2 small = covering_grid(-1.0, 1.0, -1.0, 1.0, 0.25);
  expect_error(ErrorKind::InvalidArgument, [&] { circular_flow(example::velocity_profile(), {0.0, 0.0}, small); });
}

TEST_CASE("the sampled example matches the analytic gradient") {
  const double h = 1.0 / 32;
  Placement pl;
  pl.center = {0.25, -0.1};
  pl.shear = 0.3;
  const Grid2 g = covering_grid(-2.7, 3.2, -2.4, 2.2, h);
  const ExampleFlow ex = example_flow(g, pl);
  const VectorField2 pg = perp_gradient(ex.phi);
  for (Vec2 p : {Vec2{1.6, 0.3}, Vec2{-0.9, 1.1}, Vec2{0.5, -1.4}}) {
    const std::size_t k = g.nearest(p);
    const Vec2 x = g.node(k);
    const Vec2 grad = example_gradient(pl, x);
    CHECK(ex.u[k].x == doctest::Approx(-grad.y).epsilon(1e-12));
    CHECK(ex.u[k].y == doctest::Approx(grad.x).epsilon(1e-12));
    CHECK(ex.phi[k] == doctest::Approx(example::phi(norm(pl.map(x)))));
    CHECK(std::abs(pg[k].x - ex.u[k].x) < 0.02);
  }
  expect_error(ErrorKind::InvalidArgument, [] { example_flow(covering_grid(-1, 1, -1, 1, 0.1)); });
}

TEST_CASE("pressure of a circular flow") {
  const RadialProfile p = pressure_radial(example::velocity_profile());
  CHECK(p(0.5) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(p(1.5) == doctest::Approx(43.0 / 120.0).epsilon(1e-9));
  CHECK(p(2.0) == doctest::Approx(0.8).epsilon(1e-9));
  CHECK(p(3.0) == doctest::Approx(0.8).epsilon(1e-9));
  for (double r : {1.1, 1.37, 1.8}) {
    const double d = 1e-5;
    const double v = example::velocity(r);
    CHECK((p(r + d) - p(r - d)) / (2 * d) == doctest::Approx(r * v * v).epsilon(1e-6));
  }
}

TEST_CASE("adaptive Simpson quadrature") {
  CHECK(adaptive_simpson([](double x) { return std::sin(x); }, 0.0, std::numbers::pi, 1e-12) ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK(adaptive_simpson([](double x) { return std::exp(x); }, 0.0, 1.0, 1e-12) ==
        doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-12));
}

TEST_CASE("disjoint superposition") {
  const Grid2 g = covering_grid(-5.0, 5.0, -2.5, 2.5, 0.125);
  const RadialProfile v = example::velocity_profile();
  const VectorField2 u = superpose_disjoint({{v, {-2.25, 0.0}}, {v, {2.25, 0.0}}}, g);
  const VectorField2 a = circular_flow(v, {-2.25, 0.0}, g);
  const std::size_t k = g.nearest({-0.75, 0.0});
  CHECK(u[k].y == doctest::Approx(a[k].y));
  CHECK(norm(u[g.nearest({0.0, 0.0})]) == 0.0);
  expect_error(ErrorKind::InvalidArgument, [&] { superpose_disjoint({{v, {-1.5, 0.0}}, {v, {1.5, 0.0}}}, g); });
}

TEST_CASE("sampled radial fields") {
  const Grid2 g = covering_grid(-3, 3, -3, 3, 0.1);
  const ScalarField p = sample_radial(pressure_radial(example::velocity_profile()), {0.0, 0.0}, g);
  CHECK(p[g.nearest({2.9, 0.0})] == doctest::Approx(0.8).epsilon(1e-9));
}
