#include "eulerlab/kernels.hpp"

#include "eulerlab/parallel.hpp"

namespace eulerlab {

namespace {

// Each kernel is a per-node functor evaluated on interior nodes; the serial and
// parallel drivers share it so the two paths perform identical arithmetic.

template <class Out, class Node>
void drive_serial(const Grid2& g, Out& out, Node&& node) {
  for (int j = 1; j < g.ny - 1; ++j)
    for (int i = 1; i < g.nx - 1; ++i) out(i, j) = node(i, j);
}

template <class Out, class Node>
void drive_parallel(const Grid2& g, Out& out, Node&& node) {
  const int threads = thread_limit();
#pragma omp parallel for schedule(static) num_threads(threads) if (threads > 1)
  for (int j = 1; j < g.ny - 1; ++j)
    for (int i = 1; i < g.nx - 1; ++i) out(i, j) = node(i, j);
}

struct Laplacian {
  const ScalarField& f;
  double inv_h2;
  double operator()(int i, int j) const {
    return (f(i + 1, j) + f(i - 1, j) + f(i, j + 1) + f(i, j - 1) - 4.0 * f(i, j)) * inv_h2;
  }
};

struct Gradient {
  const ScalarField& f;
  double inv_2h;
  Vec2 operator()(int i, int j) const {
    return {(f(i + 1, j) - f(i - 1, j)) * inv_2h, (f(i, j + 1) - f(i, j - 1)) * inv_2h};
  }
};

struct PerpGradient {
  const ScalarField& f;
  double inv_2h;
  Vec2 operator()(int i, int j) const {
    return {-(f(i, j + 1) - f(i, j - 1)) * inv_2h, (f(i + 1, j) - f(i - 1, j)) * inv_2h};
  }
};

struct Divergence {
  const VectorField2& u;
  double inv_2h;
  double operator()(int i, int j) const {
    return (u(i + 1, j).x - u(i - 1, j).x) * inv_2h + (u(i, j + 1).y - u(i, j - 1).y) * inv_2h;
  }
};

struct Curl {
  const VectorField2& u;
  double inv_2h;
  double operator()(int i, int j) const {
    return (u(i + 1, j).y - u(i - 1, j).y) * inv_2h - (u(i, j + 1).x - u(i, j - 1).x) * inv_2h;
  }
};

struct Advect {
  const VectorField2& a;
  const VectorField2& b;
  double inv_2h;
  Vec2 operator()(int i, int j) const {
    const Vec2 v = a(i, j);
    const Vec2 dx = (b(i + 1, j) - b(i - 1, j)) * inv_2h;
    const Vec2 dy = (b(i, j + 1) - b(i, j - 1)) * inv_2h;
    return v.x * dx + v.y * dy;
  }
};

template <bool Parallel, class Out, class Node>
Out run(const Grid2& g, Node node) {
  Out out(g);
  if constexpr (Parallel)
    drive_parallel(g, out, node);
  else
    drive_serial(g, out, node);
  return out;
}

template <bool P>
ScalarField laplacian_impl(const ScalarField& f) {
  return run<P, ScalarField>(f.grid, Laplacian{f, 1.0 / (f.grid.h * f.grid.h)});
}
template <bool P>
VectorField2 gradient_impl(const ScalarField& f) {
  return run<P, VectorField2>(f.grid, Gradient{f, 0.5 / f.grid.h});
}
template <bool P>
VectorField2 perp_gradient_impl(const ScalarField& f) {
  return run<P, VectorField2>(f.grid, PerpGradient{f, 0.5 / f.grid.h});
}
template <bool P>
ScalarField divergence_impl(const VectorField2& u) {
  return run<P, ScalarField>(u.grid, Divergence{u, 0.5 / u.grid.h});
}
template <bool P>
ScalarField curl_impl(const VectorField2& u) {
  return run<P, ScalarField>(u.grid, Curl{u, 0.5 / u.grid.h});
}
template <bool P>
VectorField2 advect_impl(const VectorField2& a, const VectorField2& b) {
  require_same_grid(a.grid, b.grid, "advect");
  return run<P, VectorField2>(a.grid, Advect{a, b, 0.5 / a.grid.h});
}

}  // namespace

ScalarField laplacian(const ScalarField& f) { return laplacian_impl<true>(f); }
VectorField2 gradient(const ScalarField& f) { return gradient_impl<true>(f); }
VectorField2 perp_gradient(const ScalarField& f) { return perp_gradient_impl<true>(f); }
ScalarField divergence(const VectorField2& u) { return divergence_impl<true>(u); }
ScalarField curl(const VectorField2& u) { return curl_impl<true>(u); }
VectorField2 advect(const VectorField2& a, const VectorField2& b) { return advect_impl<true>(a, b); }

namespace serial {
ScalarField laplacian(const ScalarField& f) { return laplacian_impl<false>(f); }
VectorField2 gradient(const ScalarField& f) { return gradient_impl<false>(f); }
VectorField2 perp_gradient(const ScalarField& f) { return perp_gradient_impl<false>(f); }
ScalarField divergence(const VectorField2& u) { return divergence_impl<false>(u); }
ScalarField curl(const VectorField2& u) { return curl_impl<false>(u); }
VectorField2 advect(const VectorField2& a, const VectorField2& b) { return advect_impl<false>(a, b); }
}  // namespace serial

}  // namespace eulerlab
