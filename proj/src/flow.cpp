#include "eulerlab/flow.hpp"

#include <algorithm>
#include <cmath>

namespace eulerlab {

RadialProfile::RadialProfile(double inner, double outer, std::function<double(double)> fn,
                             Smoothness smoothness, Extension extension)
    : inner_(inner), outer_(outer), fn_(std::move(fn)), smoothness_(smoothness), extension_(extension) {
  require(inner >= 0.0 && outer > inner, "radial profile needs 0 <= inner < outer");
  require(static_cast<bool>(fn_), "radial profile needs an evaluator");
}

RadialProfile RadialProfile::sampled(std::vector<double> r, std::vector<double> v, Smoothness smoothness) {
  require(r.size() == v.size() && r.size() >= 2, "sampled profile needs matching arrays of length >= 2");
  for (std::size_t k = 1; k < r.size(); ++k) require(r[k] > r[k - 1], "sampled profile radii must increase");
  auto rs = std::make_shared<std::vector<double>>(std::move(r));
  auto vs = std::make_shared<std::vector<double>>(std::move(v));
  const double lo = rs->front(), hi = rs->back();
  auto fn = [rs, vs](double x) {
    const auto& R = *rs;
    const auto& V = *vs;
    if (x <= R.front()) return V.front();
    if (x >= R.back()) return V.back();
    const std::size_t k = static_cast<std::size_t>(std::upper_bound(R.begin(), R.end(), x) - R.begin()) - 1;
    const double t = (x - R[k]) / (R[k + 1] - R[k]);
    return (1 - t) * V[k] + t * V[k + 1];
  };
  return RadialProfile(std::max(0.0, lo), hi, std::move(fn), smoothness, Extension::Constant);
}

double RadialProfile::operator()(double r) const {
  if (r < inner_ || r > outer_) {
    if (extension_ == Extension::Zero) return 0.0;
    return fn_(std::clamp(r, inner_, outer_));
  }
  return fn_(r);
}

namespace example {

double phi(double r) {
  if (r <= kInner) return 1.0;
  if (r >= kOuter) return 0.0;
  const double a = r * (2.0 - r);
  return a * a;
}

double dphi(double r) {
  if (r <= kInner || r >= kOuter) return 0.0;
  return 4.0 * r * (2.0 - r) * (1.0 - r);
}

double d2phi(double r) {
  if (r < kInner || r > kOuter) return 0.0;
  return 8.0 - 24.0 * r + 12.0 * r * r;
}

double laplacian(double r) {
  if (r < kInner || r > kOuter) return 0.0;
  return 16.0 - 36.0 * r + 16.0 * r * r;
}

double f(double s) {
  s = std::clamp(s, 0.0, 1.0);
  const double q = std::sqrt(s);
  return 4.0 * (4.0 * q + std::sqrt(std::max(0.0, 1.0 - q)) - 3.0);
}

double fprime(double s) {
  const double q = std::sqrt(s);
  return 8.0 / q - 1.0 / (q * std::sqrt(1.0 - q));
}

double velocity(double r) {
  if (r <= kInner || r >= kOuter) return 0.0;
  return 4.0 * (2.0 - r) * (1.0 - r);
}

RadialProfile velocity_profile() { return RadialProfile(kInner, kOuter, velocity, Smoothness::C2); }

ClosedFormPair pair() { return ClosedFormPair{phi, f, kInner, kOuter}; }

}  // namespace example

Vec2 example_gradient(const Placement& placement, Vec2 x) {
  const Vec2 y = placement.map(x);
  const double r = norm(y);
  if (r <= example::kInner || r >= example::kOuter) return {};
  const double g = example::dphi(r) / r;
  // grad of phi(|A(x-c)|) = A^T (phi'(|y|) y/|y|), A = [[1, s], [0, 1]].
  return {g * y.x, g * (placement.shear * y.x + y.y)};
}

ExampleFlow example_flow(const Grid2& grid, const Placement& placement) {
  const double half_x = example::kOuter * std::sqrt(1.0 + placement.shear * placement.shear) + 0.2;
  const double half_y = example::kOuter + 0.2;
  const Vec2 c = placement.center;
  const double slack = 1e-9;
  if (grid.x0 > c.x - half_x + slack || grid.x_max() < c.x + half_x - slack ||
      grid.y0 > c.y - half_y + slack || grid.y_max() < c.y + half_y - slack)
    fail(ErrorKind::InvalidArgument, "example_flow: grid does not cover the support with a 0.2 margin");
  ExampleFlow out;
  out.placement = placement;
  out.pair = example::pair();
  out.phi = sample_scalar(grid, [&](Vec2 x) { return example::phi(norm(placement.map(x))); });
  out.u = sample_vector(grid, [&](Vec2 x) { return perp(example_gradient(placement, x)); });
  return out;
}

VectorField2 circular_flow(const RadialProfile& v, Vec2 center, const Grid2& grid) {
  const double R = v.outer();
  if (center.x - R < grid.x0 || center.x + R > grid.x_max() || center.y - R < grid.y0 ||
      center.y + R > grid.y_max())
    fail(ErrorKind::InvalidArgument, "circular_flow: support exceeds the grid");
  return sample_vector(grid, [&](Vec2 x) {
    const Vec2 d = x - center;
    const double r = norm(d);
    if (r < v.inner() || r > v.outer()) return Vec2{};
    return v(r) * perp(d);
  });
}

namespace {

double simpson_step(const std::function<double(double)>& fn, double a, double b, double fa, double fm,
                    double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = fn(lm), frm = fn(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_step(fn, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(fn, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& fn, double a, double b, double tol) {
  if (a == b) return 0.0;
  const double fa = fn(a), fb = fn(b), fm = fn(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(fn, a, b, fa, fm, fb, whole, tol, 50);
}

RadialProfile pressure_radial(const RadialProfile& v) {
  const double lo = v.inner(), hi = v.outer();
  constexpr int kIntervals = 1024;
  auto integrand = [&v](double s) {
    const double val = v(s);
    return s * val * val;
  };
  auto table = std::make_shared<std::vector<double>>(kIntervals + 1, 0.0);
  auto slope = std::make_shared<std::vector<double>>(kIntervals + 1, 0.0);
  const double dr = (hi - lo) / kIntervals;
  for (int k = 0; k < kIntervals; ++k) {
    const double a = lo + k * dr;
    (*table)[k + 1] = (*table)[k] + adaptive_simpson(integrand, a, a + dr, 1e-10 / kIntervals);
  }
  for (int k = 0; k <= kIntervals; ++k) (*slope)[k] = integrand(lo + k * dr);
  // Cubic Hermite interpolation with the exact derivative r V(r)^2.
  auto fn = [table, slope, lo, dr](double r) {
    const double x = (r - lo) / dr;
    const int k = std::clamp(static_cast<int>(std::floor(x)), 0, kIntervals - 1);
    const double t = x - k;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * (*table)[k] + (t3 - 2 * t2 + t) * dr * (*slope)[k] +
           (-2 * t3 + 3 * t2) * (*table)[k + 1] + (t3 - t2) * dr * (*slope)[k + 1];
  };
  return RadialProfile(lo, hi, std::move(fn), v.smoothness(), Extension::Constant);
}

ScalarField sample_radial(const RadialProfile& p, Vec2 center, const Grid2& grid) {
  return sample_scalar(grid, [&](Vec2 x) { return p(norm(x - center)); });
}

VectorField2 superpose_disjoint(const std::vector<std::pair<RadialProfile, Vec2>>& flows, const Grid2& grid) {
  require(!flows.empty(), "superpose_disjoint: no flows given");
  for (std::size_t a = 0; a < flows.size(); ++a)
    for (std::size_t b = a + 1; b < flows.size(); ++b) {
      const double gap = norm(flows[a].second - flows[b].second);
      if (!(gap > flows[a].first.outer() + flows[b].first.outer()))
        fail(ErrorKind::InvalidArgument, "superpose_disjoint: supports overlap");
    }
  VectorField2 sum(grid);
  for (const auto& [profile, center] : flows) {
    const VectorField2 u = circular_flow(profile, center, grid);
    for (std::size_t k = 0; k < sum.values.size(); ++k) sum[k] = sum[k] + u[k];
  }
  return sum;
}

}  // namespace eulerlab
