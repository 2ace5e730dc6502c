#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "eulerlab/contour.hpp"
#include "eulerlab/grid.hpp"
#include "eulerlab/mask.hpp"

namespace eulerlab {

struct LevelSet {
  double c = 0.0;
  std::vector<Polyline> polylines;
  bool connected = false;
};

struct EndpointRates {
  double rate0 = 0.0;  ///< exponent of |f'| near c = 0
  double rate1 = 0.0;  ///< exponent of |f'| near c = 1
};

/// The extracted nonlinearity. levels[0] = 0 and levels.back() = 1 hold the
/// boundary values; the entries in between come from level curves.
struct SampledNonlinearity {
  std::vector<double> levels;
  std::vector<double> f;
  std::vector<double> spread;
  std::vector<int> curve_count;  ///< polylines per level (0 for the endpoint entries)
  std::optional<EndpointRates> endpoint_rates;

  /// Piecewise-linear interpolant, clamped to [0, 1].
  double operator()(double c) const;
  /// Centered differences of f at the levels (one-sided at the ends).
  std::vector<double> derivative() const;
};

/// phi with the extension used by the level-set and reflection code: phi on
/// Omega, 1 in the holes, 0 outside the outer curve.
ScalarField extend_stream_function(const ScalarField& phi, const DomainMask& mask);

/// Curves {phi = c} for c strictly inside (0, 1). Throws LevelNotAttained if empty.
LevelSet level_set(const ScalarField& phi, const DomainMask& mask, double c);

/// Curve count per level; empty levels give 0.
std::vector<std::pair<double, int>> connectedness_scan(const ScalarField& phi, const DomainMask& mask,
                                                       const std::vector<double>& levels);

/// Uniform levels k / (n + 1), k = 1..n.
std::vector<double> uniform_levels(int n);

/// Throws InteriorCriticalPoint if grad(phi) vanishes on a node with d > 2h or
/// winds around a grid cell whose corners all have d > 2h.
void check_no_critical_points(const ScalarField& phi, const DomainMask& mask);

/// f(c) = arc-length mean of -lap(phi) along {phi = c}; spread = weighted standard
/// deviation. f(0), f(1) are means of -lap(phi) over nodes with h < d <= 2h whose
/// nearest boundary curve is the outer curve, respectively the hole.
SampledNonlinearity extract_f(const ScalarField& phi, const DomainMask& mask, int n_levels);
SampledNonlinearity extract_f(const ScalarField& phi, const DomainMask& mask, const std::vector<double>& levels);

/// Fits |f'| ~ a + b delta^p near each endpoint (delta = distance to the endpoint)
/// using difference quotients with delta <= 0.1; returns p. A constant quotient gives 0.
/// Throws InvalidArgument with fewer than 16 levels within 0.1 of an endpoint.
EndpointRates endpoint_regularity(const SampledNonlinearity& nl);

struct MeanZero {
  double value = 0.0;
  bool empty_domain = false;
};

/// sum f(phi) / sum |f(phi)| over the inside nodes (midpoint rule).
MeanZero mean_zero_check(const SampledNonlinearity& nl, const ScalarField& phi, const DomainMask& mask);
MeanZero mean_zero_check(const std::function<double(double)>& f, const ScalarField& phi, const DomainMask& mask);

}  // namespace eulerlab
