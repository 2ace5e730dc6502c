#include "eulerlab/euler.hpp"

#include <algorithm>
#include <cmath>

#include "eulerlab/kernels.hpp"
#include "eulerlab/parallel.hpp"
#include "eulerlab/poisson.hpp"

namespace eulerlab {

ScalarField vorticity(const VectorField2& u) { return curl(u); }

namespace {

std::vector<std::size_t> nodes_beyond(const DomainMask& mask, int reach) {
  const Grid2& g = mask.grid;
  std::vector<std::size_t> nodes;
  for (int j = reach; j < g.ny - reach; ++j)
    for (int i = reach; i < g.nx - reach; ++i) {
      const std::size_t k = g.index(i, j);
      if (mask.inside[k] && mask.distance[k] > reach * g.h) nodes.push_back(k);
    }
  return nodes;
}

ResidualNorm norms_of(const std::vector<double>& r, double h, double scale) {
  ResidualNorm out;
  std::vector<double> sq(r.size());
  for (std::size_t k = 0; k < r.size(); ++k) {
    out.max = std::max(out.max, std::abs(r[k]));
    sq[k] = r[k] * r[k];
  }
  out.l2 = std::sqrt(deterministic_sum(sq)) * h;
  out.normalized = scale > 0.0 ? out.max / scale : 0.0;
  return out;
}

double max_over(const std::vector<std::size_t>& nodes, const auto& fn) {
  double m = 0.0;
  for (std::size_t k : nodes) m = std::max(m, fn(k));
  return m;
}

double jacobian_norm(const VectorField2& u, std::size_t k) {
  const Grid2& g = u.grid;
  const int i = static_cast<int>(k % static_cast<std::size_t>(g.nx));
  const int j = static_cast<int>(k / static_cast<std::size_t>(g.nx));
  const Vec2 dx = (u(i + 1, j) - u(i - 1, j)) * (0.5 / g.h);
  const Vec2 dy = (u(i, j + 1) - u(i, j - 1)) * (0.5 / g.h);
  return std::sqrt(dx.x * dx.x + dx.y * dx.y + dy.x * dy.x + dy.y * dy.y);
}

SteadyReport base_report(const VectorField2& u, const DomainMask& mask, const std::vector<std::size_t>& nodes) {
  SteadyReport rep;
  rep.nodes = nodes.size();
  const ScalarField div = divergence(u);
  std::vector<double> r(nodes.size());
  for (std::size_t n = 0; n < nodes.size(); ++n) r[n] = div[nodes[n]];
  rep.divergence = norms_of(r, u.grid.h, max_over(nodes, [&](std::size_t k) { return jacobian_norm(u, k); }));
  rep.transport = transport_norms(u, mask);
  return rep;
}

ResidualNorm transport_on(const VectorField2& u, const std::vector<std::size_t>& nodes) {
  const VectorField2 grad_w = gradient(curl(u));
  std::vector<double> r(nodes.size());
  double max_gw = 0.0, max_u = 0.0;
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    const std::size_t k = nodes[n];
    r[n] = dot(grad_w[k], u[k]);
    max_gw = std::max(max_gw, norm(grad_w[k]));
    max_u = std::max(max_u, norm(u[k]));
  }
  return norms_of(r, u.grid.h, max_gw * max_u);
}

}  // namespace

std::vector<std::size_t> analysis_nodes(const DomainMask& mask) { return nodes_beyond(mask, 2); }

std::vector<std::size_t> parallel_nodes(const DomainMask& mask) { return nodes_beyond(mask, 3); }

ResidualNorm transport_norms(const VectorField2& u, const DomainMask& mask) {
  require_same_grid(u.grid, mask.grid, "transport_residual");
  return transport_on(u, analysis_nodes(mask));
}

ResidualNorm parallel_norms(const ScalarField& phi, const DomainMask& mask) {
  require_same_grid(phi.grid, mask.grid, "parallel_residual");
  return transport_on(perp_gradient(phi), parallel_nodes(mask));
}

double transport_residual(const VectorField2& u, const DomainMask& mask) {
  return transport_norms(u, mask).normalized;
}

double parallel_residual(const ScalarField& phi, const DomainMask& mask) {
  return parallel_norms(phi, mask).normalized;
}

SteadyReport steady_residual(const VectorField2& u, const DomainMask& mask) {
  require_same_grid(u.grid, mask.grid, "steady_residual");
  const auto nodes = analysis_nodes(mask);
  SteadyReport rep = base_report(u, mask, nodes);
  // The stream-function form: with phi solving lap(phi) = curl(u), perp(grad phi)
  // reproduces u up to the solver, so the parallel residual is evaluated on it.
  if (!nodes.empty()) {
    rep.parallel = parallel_norms(poisson_dirichlet(curl(u)), mask);
  }
  return rep;
}

SteadyReport steady_residual(const VectorField2& u, const ScalarField& p, const DomainMask& mask) {
  require_same_grid(u.grid, p.grid, "steady_residual");
  SteadyReport rep = steady_residual(u, mask);
  const auto nodes = analysis_nodes(mask);
  const VectorField2 adv = advect(u, u);
  const VectorField2 gp = gradient(p);
  std::vector<double> r(nodes.size());
  double max_adv = 0.0, max_gp = 0.0;
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    const std::size_t k = nodes[n];
    r[n] = norm(adv[k] + gp[k]);
    max_adv = std::max(max_adv, norm(adv[k]));
    max_gp = std::max(max_gp, norm(gp[k]));
  }
  rep.momentum = norms_of(r, u.grid.h, max_adv + max_gp);
  return rep;
}

double polyline_mean(const ScalarField& f, const Polyline& curve) {
  const auto& v = curve.vertices;
  const std::size_t n = v.size();
  require(n >= 2, "polyline_mean: curve needs at least two vertices");
  double total = 0.0, weight = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const Vec2 a = v[k], b = v[(k + 1) % n];
    const double len = norm(b - a);
    total += 0.5 * len * (f.sample(a) + f.sample(b));
    weight += len;
  }
  require(weight > 0.0, "polyline_mean: degenerate curve");
  return total / weight;
}

StreamFunction stream_function(const VectorField2& u, const DomainMask& mask) {
  require_same_grid(u.grid, mask.grid, "stream_function");
  if (mask.inside_count() == 0) fail(ErrorKind::EmptyDomain, "stream_function: empty mask");
  if (mask.components.size() != 2)
    fail(ErrorKind::UnsupportedTopology,
         "stream_function: expected an annular mask with 2 boundary curves, got " +
             std::to_string(mask.components.size()));
  const Grid2& g = u.grid;
  StreamFunction out;
  const double umax = u.max_norm();
  const auto nodes = analysis_nodes(mask);
  const ScalarField div = divergence(u);
  out.max_divergence = max_over(nodes, [&](std::size_t k) { return std::abs(div[k]); });
  if (out.max_divergence > 10.0 * g.h * g.h * umax)
    fail(ErrorKind::InconsistentField, "stream_function: u is not divergence free (max |div u| = " +
                                           std::to_string(out.max_divergence) + ")");

  const ScalarField omega = curl(u);
  ScalarField raw = poisson_dirichlet(omega);
  out.poisson_residual = poisson_relative_residual(raw, omega);

  for (const Polyline& c : mask.components) {
    out.raw_means.push_back(polyline_mean(raw, c));
    double lo = INFINITY, hi = -INFINITY;
    for (Vec2 p : c.vertices) {
      const double v = raw.sample(p);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    out.raw_spread.push_back(hi - lo);
  }
  const double m0 = out.raw_means[0], m1 = out.raw_means[1];
  const double span = m1 - m0;
  for (std::size_t c = 0; c < out.raw_spread.size(); ++c)
    if (out.raw_spread[c] > 10.0 * g.h * umax)
      fail(ErrorKind::InconsistentField, "stream_function: stream function not constant along boundary " +
                                             std::to_string(c));
  if (!(std::abs(span) > 0.0))
    fail(ErrorKind::InconsistentField, "stream_function: boundary means coincide");
  out.phi = ScalarField(g);
  for (std::size_t k = 0; k < g.size(); ++k) out.phi[k] = (raw[k] - m0) / span;
  for (double s : out.raw_spread) out.spread.push_back(s / std::abs(span));
  return out;
}

}  // namespace eulerlab
