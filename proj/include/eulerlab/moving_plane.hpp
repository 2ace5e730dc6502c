#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "eulerlab/flow.hpp"
#include "eulerlab/grid.hpp"
#include "eulerlab/mask.hpp"
#include "eulerlab/nonlinearity.hpp"

namespace eulerlab {

/// Reflection across the plane {x . dir = lambda}.
inline Vec2 reflect(Vec2 x, Vec2 dir, double lambda) { return x - 2.0 * (dot(x, dir) - lambda) * dir; }

struct ReflectResult {
  ScalarField w;                  ///< phi(pi(x)) - phi(x) on the cap, 0 elsewhere
  std::vector<std::size_t> cap;   ///< nodes of the closed outer region with x . dir > lambda
  double min_w = 0.0;
  Vec2 argmin{};
};

/// w = phi o pi - phi on the cap, phi extended by 1 in the holes and 0 outside;
/// phi(pi(x)) by bilinear interpolation. Throws InvalidArgument if the cap is
/// empty or a reflected cap node leaves the grid.
ReflectResult reflect_compare(const ScalarField& phi, const DomainMask& mask, Vec2 dir, double lambda);

/// max |f(phi(x)) - f(phi(y))| min(d(x), d(y)) / |phi(x) - phi(y)| over a
/// deterministic R2 low-discrepancy sample of inside-node pairs (pairs with
/// |phi(x) - phi(y)| <= 1e-9 are skipped). Needs n_pairs >= 10^4.
double singular_quotient_bound(const SampledNonlinearity& f, const ScalarField& phi, const DomainMask& mask,
                               long n_pairs);
/// Same quotient with an arbitrary f (synthetic tests).
double singular_quotient_bound(const std::function<double(double)>& f, const ScalarField& phi,
                               const DomainMask& mask, long n_pairs);

/// min |grad phi| / d over inside nodes with 0 < d < band_width.
double gradient_lower_bound(const ScalarField& phi, const DomainMask& mask, double band_width);

struct FprimeBound {
  double value = 0.0;         ///< max |f'(phi(x))| d(x) over inside nodes
  double coarse_value = 0.0;  ///< same from every other level
  bool divergent = false;     ///< value > 1.75 coarse_value: grows like 1/spacing, as for a jump
};

FprimeBound fprime_bound(const SampledNonlinearity& f, const ScalarField& phi, const DomainMask& mask);

enum class PlaneEvent { None, Tangency, Orthogonality };
const char* to_string(PlaneEvent e);

struct SweepOptions {
  double tol_multiplier = 10.0;  ///< tol_w = multiplier h^2 osc(phi)
};

struct PlaneSweepState {
  Vec2 direction{};
  double lambda_bar = 0.0;
  double lambda_star = 0.0;
  PlaneEvent event = PlaneEvent::None;
  bool tangency = false;
  bool orthogonality = false;
  double tangency_metric = 0.0;  ///< min gap/s over reflected boundary vertices with s > 2h
  double tol_w = 0.0;
  bool stopped_by_violation = false;  ///< the sweep ended on min_w < -tol_w
  double symmetric_residual = 0.0;    ///< max |w| on the cap at lambda_star
  double symmetric_tolerance = 0.0;   ///< 2h max|grad phi| + tol_w
  bool symmetric = false;
  int normal_sign_violations = 0;  ///< boundary vertices within 2h of the plane with the wrong normal sign
  int normal_sign_borderline = 0;  ///< same with |nu . dir| <= h (not decided)
  std::vector<std::pair<double, double>> w_min_history;  ///< (lambda, min w)

  bool success() const { return event != PlaneEvent::None && symmetric; }
};

/// Decreasing sweep from lambda_bar - h in steps of h/2 (snapped to the
/// half-grid lattice for axis directions). lambda_star is the last lambda with
/// min_w >= -tol_w for every lambda' in [lambda, lambda_bar). Throws
/// UnsupportedTopology unless the mask is annular.
PlaneSweepState critical_plane(const ScalarField& phi, const DomainMask& mask, Vec2 dir, const SweepOptions& opt = {});

struct SymmetryReport {
  std::vector<PlaneSweepState> sweeps;
  int directions = 0;
  Vec2 center{};
  std::vector<double> profile_r;    ///< bin mean radius
  std::vector<double> profile_phi;  ///< bin mean of phi
  double fit_residual = 0.0;
  double fit_tolerance = 0.0;
  bool decreasing = false;
  bool radial = false;
  std::optional<Vec2> violating_direction;
  bool reverified = false;  ///< radial verdict confirmed with 16 directions

  RadialProfile profile() const;
};

/// Sweeps n_directions angles in [0, pi) and their negations, intersects the
/// critical planes, fits a binned radial profile (bin width h) and decides.
/// Radial verdicts from fewer than 16 directions are re-run with 16.
SymmetryReport symmetry_verdict(const ScalarField& phi, const DomainMask& mask, int n_directions,
                                const SweepOptions& opt = {});

struct CoefficientBudget {
  double max_scaled = 0.0;  ///< max |c(x)| min(d(x), d(pi(x)))
  std::size_t nodes = 0;
  Vec2 worst{};
};

/// The reflected coefficient c(x) = -(f(phi(pi x)) - f(phi(x))) / (phi(pi x) - phi(x))
/// on the inside cap nodes where the denominator exceeds 1e-9.
CoefficientBudget moving_plane_coefficient(const SampledNonlinearity& f, const ScalarField& phi,
                                           const DomainMask& mask, Vec2 dir, double lambda);

}  // namespace eulerlab
