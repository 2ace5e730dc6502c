#include "eulerlab/poisson.hpp"

#include <fftw3.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "eulerlab/kernels.hpp"
#include "eulerlab/parallel.hpp"

namespace eulerlab {

ScalarField poisson_dirichlet(const ScalarField& rhs) {
  const Grid2& g = rhs.grid;
  const int mx = g.nx - 2;
  const int my = g.ny - 2;
  // Interior block in FFTW's row-major layout: slow index j, fast index i.
  std::vector<double> buf(static_cast<std::size_t>(mx) * my);
  for (int j = 0; j < my; ++j)
    for (int i = 0; i < mx; ++i) buf[static_cast<std::size_t>(j) * mx + i] = rhs(i + 1, j + 1);

  fftw_plan plan = fftw_plan_r2r_2d(my, mx, buf.data(), buf.data(), FFTW_RODFT00, FFTW_RODFT00, FFTW_ESTIMATE);
  fftw_execute(plan);

  const double h2 = g.h * g.h;
  std::vector<double> lx(mx), ly(my);
  for (int k = 0; k < mx; ++k) lx[k] = (2.0 * std::cos(std::numbers::pi * (k + 1) / (mx + 1)) - 2.0) / h2;
  for (int k = 0; k < my; ++k) ly[k] = (2.0 * std::cos(std::numbers::pi * (k + 1) / (my + 1)) - 2.0) / h2;
  // RODFT00 applied twice scales by 2(n+1) per axis.
  const double scale = 1.0 / (4.0 * (mx + 1) * (my + 1));
  for (int j = 0; j < my; ++j)
    for (int i = 0; i < mx; ++i) buf[static_cast<std::size_t>(j) * mx + i] *= scale / (lx[i] + ly[j]);

  fftw_execute(plan);
  fftw_destroy_plan(plan);

  ScalarField phi(g, 0.0);
  for (int j = 0; j < my; ++j)
    for (int i = 0; i < mx; ++i) phi(i + 1, j + 1) = buf[static_cast<std::size_t>(j) * mx + i];
  return phi;
}

namespace {

// Applies -lap with zero Dirichlet data; only interior entries are meaningful.
void apply_neg_laplacian(const Grid2& g, const std::vector<double>& x, std::vector<double>& y) {
  const double inv_h2 = 1.0 / (g.h * g.h);
  const int threads = thread_limit();
#pragma omp parallel for schedule(static) num_threads(threads) if (threads > 1)
  for (int j = 1; j < g.ny - 1; ++j)
    for (int i = 1; i < g.nx - 1; ++i) {
      const std::size_t k = g.index(i, j);
      y[k] = (4.0 * x[k] - x[k - 1] - x[k + 1] - x[k - g.nx] - x[k + g.nx]) * inv_h2;
    }
}

}  // namespace

CgSolve poisson_dirichlet_cg(const ScalarField& rhs, double rel_tol, int max_iter) {
  const Grid2& g = rhs.grid;
  const std::size_t n = g.size();
  std::vector<double> x(n, 0.0), r(n, 0.0), p(n, 0.0), q(n, 0.0);
  for (int j = 1; j < g.ny - 1; ++j)
    for (int i = 1; i < g.nx - 1; ++i) r[g.index(i, j)] = -rhs(i, j);
  p = r;
  const double b_norm = std::sqrt(deterministic_dot(r, r));
  CgSolve out;
  if (b_norm == 0.0) {
    out.phi = ScalarField(g, 0.0);
    return out;
  }
  double rr = b_norm * b_norm;
  int it = 0;
  for (; it < max_iter && std::sqrt(rr) > rel_tol * b_norm; ++it) {
    apply_neg_laplacian(g, p, q);
    const double alpha = rr / deterministic_dot(p, q);
    for (std::size_t k = 0; k < n; ++k) {
      x[k] += alpha * p[k];
      r[k] -= alpha * q[k];
    }
    const double rr_new = deterministic_dot(r, r);
    const double beta = rr_new / rr;
    rr = rr_new;
    for (std::size_t k = 0; k < n; ++k) p[k] = r[k] + beta * p[k];
  }
  out.phi = ScalarField(g, std::move(x));
  out.iterations = it;
  out.relative_residual = poisson_relative_residual(out.phi, rhs);
  if (out.relative_residual > rel_tol * 10.0)
    fail(ErrorKind::ConvergenceFailure, "poisson_dirichlet_cg: no convergence within max_iter");
  return out;
}

double poisson_relative_residual(const ScalarField& phi, const ScalarField& rhs) {
  const ScalarField lap = laplacian(phi);
  double num = 0.0, den = 0.0;
  for (int j = 1; j < rhs.grid.ny - 1; ++j)
    for (int i = 1; i < rhs.grid.nx - 1; ++i) {
      const double e = lap(i, j) - rhs(i, j);
      num += e * e;
      den += rhs(i, j) * rhs(i, j);
    }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

}  // namespace eulerlab
