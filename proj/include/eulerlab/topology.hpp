#pragma once

#include <functional>
#include <string>
#include <vector>

#include "eulerlab/contour.hpp"
#include "eulerlab/grid.hpp"
#include "eulerlab/mask.hpp"

namespace eulerlab {

/// Drops consecutive duplicate vertices (including the closing pair).
Polyline remove_duplicate_vertices(const Polyline& gamma);

/// Throws SelfIntersection if two non-adjacent segments meet or adjacent
/// segments fold back onto each other. Sweep over segments sorted by min x.
void check_simple(const Polyline& gamma);

struct Winding {
  int value = 0;
  double raw = 0.0;       ///< (1/2 pi) * total signed turning of F before rounding
  double max_step = 0.0;  ///< largest absolute angle increment
};

/// Winding number of F along gamma, with F sampled at the vertices. Throws
/// VanishingField if F = 0 at a vertex and UndersampledCurve if an increment
/// exceeds pi/2 or the raw value is more than 0.1 away from an integer.
Winding winding_number(const std::function<Vec2(Vec2)>& F, const Polyline& gamma);
/// F from a grid field by bilinear interpolation.
Winding winding_number(const VectorField2& F, const Polyline& gamma);

struct Tangential {
  bool nonvanishing = false;
  double min_u_tau = 0.0;
  Vec2 where{};
  double threshold = 0.0;  ///< (2 pi / N) max |u| along the curve
};

/// min |u . tau| over the vertices, tau from the neighbouring vertices. The curve
/// counts as nonvanishing when the minimum exceeds (2 pi / N) max |u|, N = vertex count.
Tangential tangential_nonvanishing(const VectorField2& u, const Polyline& gamma);

/// Turning number from the exterior angles; throws SelfIntersection first.
int curvature_winding(const Polyline& gamma);

struct ComponentCertificate {
  double area = 0.0;
  std::size_t vertices = 0;
  int winding = 0;
  double raw_winding = 0.0;
  int turning = 0;
  double min_u_tau = 0.0;
  double tau_threshold = 0.0;
};

struct AnnularityReport {
  int n = 0;                 ///< holes of Omega_eps (components - 1)
  double eps = 0.0;
  double tol = 0.0;
  double min_u = 0.0;        ///< min |u| over nodes with d >= eps
  std::vector<ComponentCertificate> components;  ///< [0] outer, then holes by decreasing area
  int degree = 0;            ///< w_0 - sum w_i
  bool degree_matches_holes = false;  ///< degree == 1 - n
  bool degree_zero = false;           ///< degree == 0, as required when u has no zero in Omega_eps
  bool annular = false;               ///< n == 1
};

/// Curves bounding Omega_eps = {d > eps}, counterclockwise, sorted by decreasing area.
std::vector<Polyline> retracted_boundary(const DomainMask& mask, double eps);

/// The annularity argument on the retracted domain of the given mask. Throws
/// InvalidArgument unless eps > 2h and Omega_eps is nonempty, StagnationPoint
/// if |u| <= tol on a node with d >= eps, HypothesisViolation if u . tau
/// vanishes on a retracted boundary curve.
AnnularityReport annularity_verdict(const VectorField2& u, const DomainMask& mask, double tol, double eps);
/// Same with the support mask {|u| > tol}.
AnnularityReport annularity_verdict(const VectorField2& u, double tol, double eps);

}  // namespace eulerlab
