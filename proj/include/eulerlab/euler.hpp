#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "eulerlab/grid.hpp"
#include "eulerlab/mask.hpp"

namespace eulerlab {

/// Max and L2 norms of a residual over the analysis nodes, plus the max norm
/// divided by the quantity's natural scale (0 when that scale vanishes).
struct ResidualNorm {
  double max = 0.0;
  double l2 = 0.0;
  double normalized = 0.0;
};

struct SteadyReport {
  std::optional<ResidualNorm> momentum;  ///< u.grad(u) + grad(p); absent without a pressure
  ResidualNorm divergence;
  ResidualNorm transport;                ///< grad(omega) . u
  ResidualNorm parallel;                 ///< grad(lap phi) . perp(grad phi) on d > 3h, phi = stream function
  std::size_t nodes = 0;                 ///< nodes with d > 2h that entered the norms
};

/// omega = d1 u2 - d2 u1 by central differences.
ScalarField vorticity(const VectorField2& u);

/// Nodes used by the residual norms: inside the mask, d > 2h, at least two nodes
/// away from the grid edge (so every nested stencil stays on real data).
std::vector<std::size_t> analysis_nodes(const DomainMask& mask);
/// Inside nodes with d > 3h: grad(lap phi) nests stencils of reach 3h.
std::vector<std::size_t> parallel_nodes(const DomainMask& mask);

SteadyReport steady_residual(const VectorField2& u, const ScalarField& p, const DomainMask& mask);
/// Same report without the momentum balance.
SteadyReport steady_residual(const VectorField2& u, const DomainMask& mask);

/// max |grad(omega) . u| / (max |grad omega| max |u|) over the analysis nodes.
ResidualNorm transport_norms(const VectorField2& u, const DomainMask& mask);
double transport_residual(const VectorField2& u, const DomainMask& mask);
/// The transport residual of perp_gradient(phi) over the parallel nodes.
ResidualNorm parallel_norms(const ScalarField& phi, const DomainMask& mask);
double parallel_residual(const ScalarField& phi, const DomainMask& mask);

struct StreamFunction {
  ScalarField phi;                 ///< normalized: mean 0 on Gamma_0, mean 1 on Gamma_1
  std::vector<double> raw_means;   ///< arc-length means of the raw Poisson solution per component
  std::vector<double> raw_spread;  ///< max - min of the raw solution along each component
  std::vector<double> spread;      ///< same after normalization
  double max_divergence = 0.0;     ///< max |div u| over the analysis nodes
  double poisson_residual = 0.0;
};

/// Recovers phi with perp(grad phi) = u: solves lap(phi) = curl(u) on the grid
/// rectangle with phi = 0 on its edge, then rescales affinely so that the
/// boundary means are 0 on the outer curve and 1 on the hole.
///
/// Throws EmptyDomain for an empty mask, UnsupportedTopology unless the mask has
/// exactly two boundary curves, InconsistentField if u is not divergence free
/// (max |div u| > 10 h^2 max |u| on the analysis nodes) or if the raw solution
/// varies along a boundary curve by more than 10 h max |u|.
StreamFunction stream_function(const VectorField2& u, const DomainMask& mask);

/// Arc-length weighted mean of the bilinear interpolant of f along a closed polyline.
double polyline_mean(const ScalarField& f, const Polyline& curve);

}  // namespace eulerlab
