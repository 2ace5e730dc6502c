#pragma once

#include "eulerlab/grid.hpp"

/// Finite-difference kernels on the uniform grid.
///
/// All operators write the boundary ring of the output as 0; that ring is a
/// sentinel and every reduction in the library skips it. The functions in the
/// top-level namespace run OpenMP-parallel loops; the ones in `serial` are the
/// plain reference loops they are tested against (results agree bitwise).
namespace eulerlab {

/// 5-point Laplacian (f_E + f_W + f_N + f_S - 4 f_C) / h^2.
ScalarField laplacian(const ScalarField& f);
/// Central-difference gradient.
VectorField2 gradient(const ScalarField& f);
/// (-d2 f, d1 f) with central differences.
VectorField2 perp_gradient(const ScalarField& f);
/// d1 u1 + d2 u2, central differences.
ScalarField divergence(const VectorField2& u);
/// d1 u2 - d2 u1, central differences.
ScalarField curl(const VectorField2& u);
/// (a . grad) b with central differences applied to b.
VectorField2 advect(const VectorField2& a, const VectorField2& b);

namespace serial {
ScalarField laplacian(const ScalarField& f);
VectorField2 gradient(const ScalarField& f);
VectorField2 perp_gradient(const ScalarField& f);
ScalarField divergence(const VectorField2& u);
ScalarField curl(const VectorField2& u);
VectorField2 advect(const VectorField2& a, const VectorField2& b);
}  // namespace serial

}  // namespace eulerlab
