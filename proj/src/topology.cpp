#include "eulerlab/topology.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace eulerlab {

namespace {

std::string point_str(Vec2 p) {
  std::ostringstream os;
  os << "(" << p.x << ", " << p.y << ")";
  return os.str();
}

bool on_segment(Vec2 p, Vec2 a, Vec2 b) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

int orientation(Vec2 a, Vec2 b, Vec2 c) {
  const double v = cross(b - a, c - a);
  return (v > 0.0) - (v < 0.0);
}

bool segments_meet(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
  const int o1 = orientation(p1, p2, q1), o2 = orientation(p1, p2, q2);
  const int o3 = orientation(q1, q2, p1), o4 = orientation(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(q1, p1, p2)) return true;
  if (o2 == 0 && on_segment(q2, p1, p2)) return true;
  if (o3 == 0 && on_segment(p1, q1, q2)) return true;
  if (o4 == 0 && on_segment(p2, q1, q2)) return true;
  return false;
}

}  // namespace

Polyline remove_duplicate_vertices(const Polyline& gamma) {
  Polyline out;
  for (Vec2 p : gamma.vertices)
    if (out.vertices.empty() || !(out.vertices.back() == p)) out.vertices.push_back(p);
  while (out.vertices.size() > 1 && out.vertices.back() == out.vertices.front()) out.vertices.pop_back();
  return out;
}

void check_simple(const Polyline& gamma) {
  const auto& v = gamma.vertices;
  const std::size_t n = v.size();
  if (n < 3) fail(ErrorKind::SelfIntersection, "curve has fewer than 3 distinct vertices");
  for (std::size_t k = 0; k < n; ++k) {
    const Vec2 a = v[(k + n - 1) % n], b = v[k], c = v[(k + 1) % n];
    if (b == c) fail(ErrorKind::SelfIntersection, "repeated vertex at " + point_str(b));
    if (cross(b - a, c - b) == 0.0 && dot(b - a, c - b) < 0.0)
      fail(ErrorKind::SelfIntersection, "curve folds back at " + point_str(b));
  }
  std::vector<std::size_t> order(n);
  for (std::size_t k = 0; k < n; ++k) order[k] = k;
  auto xmin = [&](std::size_t k) { return std::min(v[k].x, v[(k + 1) % n].x); };
  auto xmax = [&](std::size_t k) { return std::max(v[k].x, v[(k + 1) % n].x); };
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return xmin(a) < xmin(b) || (xmin(a) == xmin(b) && a < b);
  });
  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t a = order[s];
    for (std::size_t t = s + 1; t < n && xmin(order[t]) <= xmax(a); ++t) {
      const std::size_t b = order[t];
      const std::size_t gap = a > b ? a - b : b - a;
      if (gap == 1 || gap == n - 1) continue;
      if (segments_meet(v[a], v[(a + 1) % n], v[b], v[(b + 1) % n]))
        fail(ErrorKind::SelfIntersection, "segments cross near " + point_str(v[a]));
    }
  }
}

Winding winding_number(const std::function<Vec2(Vec2)>& F, const Polyline& gamma) {
  const auto& v = gamma.vertices;
  const std::size_t n = v.size();
  require(n >= 3, "winding_number: curve needs at least 3 vertices");
  std::vector<Vec2> f(n);
  for (std::size_t k = 0; k < n; ++k) {
    f[k] = F(v[k]);
    if (!(norm(f[k]) > 0.0))
      fail(ErrorKind::VanishingField, "winding_number: field vanishes at " + point_str(v[k]));
  }
  Winding w;
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const Vec2 a = f[k], b = f[(k + 1) % n];
    const double step = std::atan2(cross(a, b), dot(a, b));
    w.max_step = std::max(w.max_step, std::abs(step));
    if (std::abs(step) > 0.5 * std::numbers::pi)
      fail(ErrorKind::UndersampledCurve, "winding_number: field turns more than pi/2 between " +
                                             point_str(v[k]) + " and " + point_str(v[(k + 1) % n]));
    total += step;
  }
  w.raw = total / (2.0 * std::numbers::pi);
  w.value = static_cast<int>(std::lround(w.raw));
  if (std::abs(w.raw - w.value) > 0.1)
    fail(ErrorKind::UndersampledCurve, "winding_number: raw value " + std::to_string(w.raw) + " is not near an integer");
  return w;
}

Winding winding_number(const VectorField2& F, const Polyline& gamma) {
  for (Vec2 p : gamma.vertices)
    if (!F.grid.contains(p)) fail(ErrorKind::InvalidArgument, "winding_number: curve leaves the grid");
  return winding_number([&F](Vec2 p) { return F.sample(p); }, gamma);
}

Tangential tangential_nonvanishing(const VectorField2& u, const Polyline& gamma) {
  const auto& v = gamma.vertices;
  const std::size_t n = v.size();
  require(n >= 3, "tangential_nonvanishing: curve needs at least 3 vertices");
  Tangential t;
  t.min_u_tau = INFINITY;
  double umax = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (!u.grid.contains(v[k])) fail(ErrorKind::InvalidArgument, "tangential_nonvanishing: curve leaves the grid");
    const Vec2 d = v[(k + 1) % n] - v[(k + n - 1) % n];
    const double len = norm(d);
    const Vec2 uk = u.sample(v[k]);
    umax = std::max(umax, norm(uk));
    const double ut = len > 0.0 ? std::abs(dot(uk, d)) / len : 0.0;
    if (ut < t.min_u_tau) {
      t.min_u_tau = ut;
      t.where = v[k];
    }
  }
  t.threshold = 2.0 * std::numbers::pi / static_cast<double>(n) * umax;
  t.nonvanishing = t.min_u_tau > t.threshold;
  return t;
}

int curvature_winding(const Polyline& gamma) {
  check_simple(gamma);
  const auto& v = gamma.vertices;
  const std::size_t n = v.size();
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const Vec2 a = v[k] - v[(k + n - 1) % n];
    const Vec2 b = v[(k + 1) % n] - v[k];
    total += std::atan2(cross(a, b), dot(a, b));
  }
  return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

std::vector<Polyline> retracted_boundary(const DomainMask& mask, double eps) {
  std::vector<Polyline> curves = contour_lines(mask.grid, mask.distance.values, eps);
  for (Polyline& c : curves) {
    c = remove_duplicate_vertices(c);
    c.make_counterclockwise();
  }
  std::stable_sort(curves.begin(), curves.end(),
                   [](const Polyline& a, const Polyline& b) { return a.signed_area() > b.signed_area(); });
  return curves;
}

AnnularityReport annularity_verdict(const VectorField2& u, const DomainMask& mask, double tol, double eps) {
  require_same_grid(u.grid, mask.grid, "annularity_verdict");
  const Grid2& g = u.grid;
  if (!(tol > 0.0)) fail(ErrorKind::InvalidArgument, "annularity_verdict: tol must be positive");
  if (!(eps > 2.0 * g.h)) fail(ErrorKind::InvalidArgument, "annularity_verdict: eps must exceed 2h");
  AnnularityReport rep;
  rep.eps = eps;
  rep.tol = tol;

  rep.min_u = INFINITY;
  std::size_t count = 0, worst = 0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!mask.inside[k] || mask.distance[k] < eps) continue;
    ++count;
    const double m = norm(u[k]);
    if (m < rep.min_u) {
      rep.min_u = m;
      worst = k;
    }
  }
  if (count == 0) fail(ErrorKind::InvalidArgument, "annularity_verdict: the retracted domain is empty");
  if (!(rep.min_u > tol))
    fail(ErrorKind::StagnationPoint, "u vanishes in the retracted domain at " + point_str(g.node(worst)));

  const std::vector<Polyline> curves = retracted_boundary(mask, eps);
  if (curves.empty()) fail(ErrorKind::InvalidArgument, "annularity_verdict: the retracted domain is empty");
  for (const Polyline& c : curves) {
    ComponentCertificate cert;
    cert.area = c.signed_area();
    cert.vertices = c.size();
    cert.turning = curvature_winding(c);
    const Tangential t = tangential_nonvanishing(u, c);
    cert.min_u_tau = t.min_u_tau;
    cert.tau_threshold = t.threshold;
    if (!t.nonvanishing)
      fail(ErrorKind::HypothesisViolation, "u . tau vanishes on a retracted boundary curve near " + point_str(t.where));
    const Winding w = winding_number(u, c);
    cert.winding = w.value;
    cert.raw_winding = w.raw;
    rep.components.push_back(cert);
  }
  rep.n = static_cast<int>(curves.size()) - 1;
  rep.degree = rep.components[0].winding;
  for (std::size_t c = 1; c < rep.components.size(); ++c) rep.degree -= rep.components[c].winding;
  rep.degree_matches_holes = rep.degree == 1 - rep.n;
  rep.degree_zero = rep.degree == 0;
  rep.annular = rep.n == 1;
  return rep;
}

AnnularityReport annularity_verdict(const VectorField2& u, double tol, double eps) {
  return annularity_verdict(u, support_mask(u, tol), tol, eps);
}

}  // namespace eulerlab
