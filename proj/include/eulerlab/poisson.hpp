#pragma once

#include "eulerlab/grid.hpp"

namespace eulerlab {

/// Solves the 5-point problem laplacian(phi) = rhs on interior nodes with
/// phi = 0 on the grid edge, by a fast sine transform (direct, exact up to rounding).
ScalarField poisson_dirichlet(const ScalarField& rhs);

struct CgSolve {
  ScalarField phi;
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Same problem by conjugate gradients; used as an independent cross-check.
CgSolve poisson_dirichlet_cg(const ScalarField& rhs, double rel_tol = 1e-10, int max_iter = 20000);

/// ||lap(phi) - rhs|| / ||rhs|| over interior nodes.
double poisson_relative_residual(const ScalarField& phi, const ScalarField& rhs);

}  // namespace eulerlab
