#include <doctest.h>

#include <cmath>

#include "eulerlab/errors.hpp"
#include "eulerlab/euler.hpp"
#include "eulerlab/flow.hpp"
#include "eulerlab/mask.hpp"

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

struct Case {
  ExampleFlow ex;
  DomainMask mask;
  ScalarField p;
};

Case example_case(double h, Placement pl = {}) {
  const Grid2 g = covering_grid(-2.8, 2.8, -2.4, 2.4, h);
  Case c{example_flow(g, pl), {}, {}};
  c.mask = mask_from_level(sample_scalar(g, [&](Vec2 x) {
    const double r = norm(pl.map(x));
    return std::min(r - 1.0, 2.0 - r);
  }));
  c.p = sample_radial(pressure_radial(example::velocity_profile()), pl.center, g);
  return c;
}

}  // namespace

TEST_CASE("vorticity of a circular flow") {
  const Case c = example_case(1.0 / 32);
  const ScalarField w = vorticity(c.ex.u);
  const Grid2& g = w.grid;
  for (double r : {1.25, 1.5, 1.75}) {
    const std::size_t k = g.nearest({r, 0.0});
    CHECK(w[k] == doctest::Approx(example::laplacian(norm(g.node(k)))).epsilon(5e-3));
  }
}

TEST_CASE("steady residuals of the example are small and converge") {
  const Case a = example_case(1.0 / 32), b = example_case(1.0 / 64);
  const SteadyReport ra = steady_residual(a.ex.u, a.p, a.mask), rb = steady_residual(b.ex.u, b.p, b.mask);
  REQUIRE(ra.momentum.has_value());
  REQUIRE(rb.momentum.has_value());
  CHECK(rb.nodes > ra.nodes);
  CHECK(rb.divergence.normalized < 1e-3);
  CHECK(rb.transport.normalized < 1e-3);
  CHECK(rb.momentum->normalized < 2e-3);
  CHECK(ra.momentum->max / rb.momentum->max > 3.0);
  CHECK(ra.transport.max / rb.transport.max > 3.0);
  const SteadyReport nop = steady_residual(b.ex.u, b.mask);
  CHECK_FALSE(nop.momentum.has_value());
  CHECK(nop.transport.max == rb.transport.max);
}

TEST_CASE("a sheared example is not steady") {
  Placement pl;
  pl.shear = 0.3;
  const Case c = example_case(1.0 / 64, pl);
  const Case ref = example_case(1.0 / 64);
  CHECK(transport_residual(c.ex.u, c.mask) > 100.0 * transport_residual(ref.ex.u, ref.mask));
  CHECK(parallel_residual(c.ex.phi, c.mask) > 5.0 * parallel_residual(ref.ex.phi, ref.mask));
}

TEST_CASE("analysis nodes stay away from the boundary") {
  const Case c = example_case(1.0 / 32);
  const double h = c.mask.grid.h;
  for (std::size_t k : analysis_nodes(c.mask)) {
    CHECK(c.mask.inside[k]);
    CHECK(c.mask.distance[k] > 2.0 * h);
  }
}

TEST_CASE("stream function recovery") {
  const Case c = example_case(1.0 / 64);
  const StreamFunction sf = stream_function(c.ex.u, c.mask);
  double err = 0.0;
  for (std::size_t k = 0; k < c.mask.grid.size(); ++k)
    if (c.mask.inside[k]) err = std::max(err, std::abs(sf.phi[k] - c.ex.phi[k]));
  CHECK(err < 2e-3);
  REQUIRE(sf.raw_means.size() == 2);
  CHECK(polyline_mean(sf.phi, c.mask.components[0]) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(polyline_mean(sf.phi, c.mask.components[1]) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sf.spread[0] < 0.01);
  CHECK(sf.spread[1] < 0.01);
}

TEST_CASE("stream function errors") {
  const Case c = example_case(1.0 / 32);
  const Grid2& g = c.mask.grid;
  const DomainMask disk = mask_from_level(disk_level(g, {0.0, 0.0}, 2.0));
  expect_error(ErrorKind::UnsupportedTopology, [&] { stream_function(c.ex.u, disk); });
  const VectorField2 source = sample_vector(g, [](Vec2 x) { return x; });
  expect_error(ErrorKind::InconsistentField, [&] { stream_function(source, c.mask); });
}

TEST_CASE("arc-length mean along a polyline") {
  const Grid2 g = covering_grid(-2, 2, -2, 2, 0.05);
  const ScalarField f = sample_scalar(g, [](Vec2 x) { return 3.0 + x.x; });
  const Polyline circle = circle_polyline({0.0, 0.0}, 1.0, 256);
  CHECK(polyline_mean(f, circle) == doctest::Approx(3.0).epsilon(1e-10));
}
