#pragma once

#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "eulerlab/grid.hpp"

namespace eulerlab {

enum class Smoothness { C0, C1, C2 };

/// How a profile continues outside its support interval.
enum class Extension { Zero, Constant };

/// A function of the radius r with support interval [inner, outer].
class RadialProfile {
 public:
  RadialProfile(double inner, double outer, std::function<double(double)> fn,
                Smoothness smoothness = Smoothness::C2, Extension extension = Extension::Zero);

  /// Piecewise-linear profile through (r[k], v[k]); r must be strictly increasing.
  static RadialProfile sampled(std::vector<double> r, std::vector<double> v,
                               Smoothness smoothness = Smoothness::C0);

  double operator()(double r) const;
  double inner() const { return inner_; }
  double outer() const { return outer_; }
  Smoothness smoothness() const { return smoothness_; }
  Extension extension() const { return extension_; }

 private:
  double inner_;
  double outer_;
  std::function<double(double)> fn_;
  Smoothness smoothness_;
  Extension extension_;
};

/// Stream function and nonlinearity given in closed form, with -lap(phi) = f(phi).
struct ClosedFormPair {
  std::function<double(double)> phi;  ///< phi(r)
  std::function<double(double)> f;    ///< f(s), s in [0, 1]
  double inner = 0.0;
  double outer = 0.0;
};

/// The explicit annular example phi(x) = |x|^2 (2 - |x|)^2 on A(0; 1, 2).
///
/// phi is stored as 1 for r < 1 and 0 for r > 2. The nonlinearity reads
/// f(s) = 4 (4 sqrt(s) + sqrt(1 - sqrt(s)) - 3) with s = phi in [0, 1];
/// f(0) = -8 and f(1) = 4.
namespace example {
inline constexpr double kInner = 1.0;
inline constexpr double kOuter = 2.0;
double phi(double r);
double dphi(double r);
double d2phi(double r);
/// Radial Laplacian phi'' + phi'/r; 0 outside the annulus.
double laplacian(double r);
double f(double s);
double fprime(double s);
/// V(r) = phi'(r)/r = 4 (2 - r)(1 - r), so that u = V(|x|) x^perp.
double velocity(double r);
RadialProfile velocity_profile();
ClosedFormPair pair();
}  // namespace example

/// Affine placement of the example: phi_p(x) = phi(|A (x - center)|) with A = [[1, shear], [0, 1]].
struct Placement {
  Vec2 center{};
  double shear = 0.0;

  Vec2 map(Vec2 x) const {
    const Vec2 d = x - center;
    return {d.x + shear * d.y, d.y};
  }
};

struct ExampleFlow {
  VectorField2 u;
  ScalarField phi;
  ClosedFormPair pair;
  Placement placement;
};

/// Samples the example on the grid: phi from the closed form and u = perp(grad phi)
/// from the analytic gradient. The grid must cover the support plus a 0.2 margin.
ExampleFlow example_flow(const Grid2& grid, const Placement& placement = {});

/// Closed-form grad(phi_p) at x.
Vec2 example_gradient(const Placement& placement, Vec2 x);

/// u(x) = V(|x - center|) (x - center)^perp; zero outside the support annulus.
VectorField2 circular_flow(const RadialProfile& v, Vec2 center, const Grid2& grid);

/// p(r) = integral from inner to r of s V(s)^2 ds (adaptive Simpson, abs tol 1e-10),
/// extended continuously (0 below, p(outer) above).
RadialProfile pressure_radial(const RadialProfile& v);

/// Samples a radial profile around a center.
ScalarField sample_radial(const RadialProfile& p, Vec2 center, const Grid2& grid);

/// Pointwise sum of circular flows; supports must be pairwise disjoint
/// (center distance greater than the sum of outer radii).
VectorField2 superpose_disjoint(const std::vector<std::pair<RadialProfile, Vec2>>& flows, const Grid2& grid);

/// Adaptive Simpson quadrature of fn over [a, b] to absolute tolerance tol.
double adaptive_simpson(const std::function<double(double)>& fn, double a, double b, double tol);

}  // namespace eulerlab
