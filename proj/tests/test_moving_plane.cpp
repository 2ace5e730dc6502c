#include <doctest.h>

#include <cmath>

#include "eulerlab/errors.hpp"
#include "eulerlab/flow.hpp"
#include "eulerlab/mask.hpp"
#include "eulerlab/moving_plane.hpp"
#include "eulerlab/nonlinearity.hpp"
#include "eulerlab/parallel.hpp"

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

struct Setup {
  ScalarField phi;
  DomainMask mask;
};

Setup setup(double h, Placement pl = {}) {
  const Grid2 g = covering_grid(-2.8, 2.8, -2.6, 2.6, h);
  return {example_flow(g, pl).phi, mask_from_level(sample_scalar(g, [&](Vec2 x) {
            const double r = norm(pl.map(x));
            return std::min(r - 1.0, 2.0 - r);
          }))};
}

}  // namespace

TEST_CASE("reflection across a plane") {
  const Vec2 q = reflect({1.0, 0.5}, {1.0, 0.0}, 0.25);
  CHECK(q.x == doctest::Approx(-0.5));
  CHECK(q.y == doctest::Approx(0.5));
  const Vec2 d = reflect({1.0, 1.0}, {1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)}, 0.0);
  CHECK(d.x == doctest::Approx(-1.0));
  CHECK(d.y == doctest::Approx(-1.0));
}

TEST_CASE("reflection comparison on the example") {
  const Setup s = setup(1.0 / 32);
  const ReflectResult above = reflect_compare(s.phi, s.mask, {1.0, 0.0}, 0.5);
  CHECK_FALSE(above.cap.empty());
  CHECK(above.min_w > -1e-12);
  const ReflectResult below = reflect_compare(s.phi, s.mask, {1.0, 0.0}, -0.1);
  CHECK(below.min_w < -0.1);
  expect_error(ErrorKind::InvalidArgument, [&] { reflect_compare(s.phi, s.mask, {1.0, 0.0}, 5.0); });
}

TEST_CASE("critical plane of the centered example") {
  const double h = 1.0 / 32;
  const Setup s = setup(h);
  const PlaneSweepState st = critical_plane(s.phi, s.mask, {1.0, 0.0});
  CHECK(std::abs(st.lambda_star) <= h);
  CHECK(st.lambda_bar == doctest::Approx(2.0).epsilon(0.01));
  CHECK(st.symmetric);
  CHECK(st.success());
  CHECK(st.event != PlaneEvent::None);
  CHECK_FALSE(st.w_min_history.empty());
  CHECK(st.normal_sign_violations == 0);
}

TEST_CASE("symmetry verdicts") {
  const double h = 1.0 / 32;
  Placement moved;
  moved.center = {0.3, -0.2};
  const SymmetryReport rep = symmetry_verdict(setup(h, moved).phi, setup(h, moved).mask, 8);
  CHECK(rep.radial);
  CHECK(rep.reverified);
  CHECK(rep.directions == 16);
  CHECK(norm(rep.center - moved.center) <= 2.0 * h);
  CHECK(rep.decreasing);
  CHECK(rep.fit_residual <= rep.fit_tolerance);
  const RadialProfile prof = rep.profile();
  CHECK(prof(1.5) == doctest::Approx(example::phi(1.5)).epsilon(0.02));

  Placement sheared;
  sheared.shear = 0.3;
  const Setup sh = setup(h, sheared);
  const SymmetryReport bad = symmetry_verdict(sh.phi, sh.mask, 8);
  CHECK_FALSE(bad.radial);
  CHECK(bad.violating_direction.has_value());
  CHECK_FALSE(bad.reverified);
  expect_error(ErrorKind::InvalidArgument, [&] { symmetry_verdict(sh.phi, sh.mask, 2); });
}

TEST_CASE("sweep results do not depend on the thread count") {
  const Setup s = setup(1.0 / 16);
  const int saved = thread_limit();
  set_thread_limit(0);
  const SymmetryReport a = symmetry_verdict(s.phi, s.mask, 4);
  set_thread_limit(4);
  const SymmetryReport b = symmetry_verdict(s.phi, s.mask, 4);
  set_thread_limit(saved);
  REQUIRE(a.sweeps.size() == b.sweeps.size());
  for (std::size_t k = 0; k < a.sweeps.size(); ++k) CHECK(a.sweeps[k].lambda_star == b.sweeps[k].lambda_star);
  CHECK(a.center.x == b.center.x);
}

TEST_CASE("singular quotient, gradient bound and coefficient budget") {
  const double h = 1.0 / 32;
  const Setup s = setup(h);
  const SampledNonlinearity nl = extract_f(s.phi, s.mask, 59);
  const double q = singular_quotient_bound(nl, s.phi, s.mask, 20000);
  CHECK(q > 0.0);
  // For a linear f the quotient is |a| min(d_i, d_j) <= |a| max d = 0.5 |a|.
  const double lin = singular_quotient_bound([](double c) { return 3.0 * c; }, s.phi, s.mask, 20000);
  CHECK(lin <= 1.5 + 1e-12);
  CHECK(lin > 1.0);
  expect_error(ErrorKind::InvalidArgument, [&] { singular_quotient_bound(nl, s.phi, s.mask, 100); });
  const double g = gradient_lower_bound(s.phi, s.mask, 0.1);
  CHECK(g > 3.0);
  CHECK(g < 5.0);
  const FprimeBound fb = fprime_bound(nl, s.phi, s.mask);
  CHECK(std::isfinite(fb.value));
  CHECK_FALSE(fb.divergent);
  const CoefficientBudget b = moving_plane_coefficient(nl, s.phi, s.mask, {1.0, 0.0}, 0.5);
  CHECK(b.nodes > 0);
  CHECK(b.max_scaled <= 1.2 * q);
}

TEST_CASE("plane event names") {
  CHECK(std::string(to_string(PlaneEvent::Tangency)) == "tangency");
  CHECK(std::string(to_string(PlaneEvent::Orthogonality)) == "orthogonality");
  CHECK(std::string(to_string(PlaneEvent::None)) == "none");
}
