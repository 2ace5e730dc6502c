#include "eulerlab/contour.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <unordered_map>

namespace eulerlab {

double Polyline::signed_area() const {
  const std::size_t n = vertices.size();
  double a = 0.0;
  for (std::size_t k = 0; k < n; ++k) a += cross(vertices[k], vertices[(k + 1) % n]);
  return 0.5 * a;
}

double Polyline::length() const {
  const std::size_t n = vertices.size();
  double l = 0.0;
  for (std::size_t k = 0; k < n; ++k) l += norm(vertices[(k + 1) % n] - vertices[k]);
  return l;
}

void Polyline::reverse() { std::reverse(vertices.begin(), vertices.end()); }

void Polyline::make_counterclockwise() {
  if (signed_area() < 0.0) reverse();
}

namespace {

// Edges of the padded lattice. Node coordinates run over [-1, nx] x [-1, ny];
// horizontal edge (i,j)-(i+1,j) and vertical edge (i,j)-(i,j+1) get ids
// 2*key and 2*key+1 with key = (j+1)*(nx+2) + (i+1).
struct Lattice {
  const Grid2& g;
  std::span<const double> v;
  double level;
  double pad;

  double value(int i, int j) const {
    if (i < 0 || j < 0 || i >= g.nx || j >= g.ny) return pad;
    return v[g.index(i, j)];
  }
  bool above(int i, int j) const { return value(i, j) > level; }
  std::int64_t key(int i, int j) const {
    return static_cast<std::int64_t>(j + 1) * (g.nx + 2) + (i + 1);
  }
  std::int64_t hedge(int i, int j) const { return 2 * key(i, j); }
  std::int64_t vedge(int i, int j) const { return 2 * key(i, j) + 1; }

  Vec2 crossing(std::int64_t edge) const {
    const std::int64_t k = edge / 2;
    const int i = static_cast<int>(k % (g.nx + 2)) - 1;
    const int j = static_cast<int>(k / (g.nx + 2)) - 1;
    const int i1 = (edge % 2 == 0) ? i + 1 : i;
    const int j1 = (edge % 2 == 0) ? j : j + 1;
    const double a = value(i, j);
    const double b = value(i1, j1);
    const double t = (a == b) ? 0.5 : std::clamp((level - a) / (b - a), 0.0, 1.0);
    const Vec2 pa = g.node(i, j);
    const Vec2 pb = g.node(i1, j1);
    return pa + t * (pb - pa);
  }
};

}  // namespace

std::vector<Polyline> contour_lines(const Grid2& grid, std::span<const double> values, double level) {
  require(values.size() == grid.size(), "contour_lines: value count does not match grid");
  double span = 0.0;
  for (double x : values) span = std::max(span, std::abs(x - level));
  Lattice L{grid, values, level, level - std::max(span, 1.0)};

  // Segments as pairs of edge ids, generated in cell order.
  std::vector<std::array<std::int64_t, 2>> segments;
  for (int j = -1; j < grid.ny; ++j) {
    for (int i = -1; i < grid.nx; ++i) {
      const bool b0 = L.above(i, j), b1 = L.above(i + 1, j);
      const bool b2 = L.above(i + 1, j + 1), b3 = L.above(i, j + 1);
      const int code = int(b0) | (int(b1) << 1) | (int(b2) << 2) | (int(b3) << 3);
      if (code == 0 || code == 15) continue;
      const std::int64_t e0 = L.hedge(i, j), e1 = L.vedge(i + 1, j);
      const std::int64_t e2 = L.hedge(i, j + 1), e3 = L.vedge(i, j);
      auto add = [&](std::int64_t a, std::int64_t b) { segments.push_back({a, b}); };
      switch (code) {
        case 1: case 14: add(e0, e3); break;
        case 2: case 13: add(e0, e1); break;
        case 3: case 12: add(e1, e3); break;
        case 4: case 11: add(e1, e2); break;
        case 6: case 9: add(e0, e2); break;
        case 7: case 8: add(e2, e3); break;
        case 5: case 10: {
          const double centre = 0.25 * (L.value(i, j) + L.value(i + 1, j) + L.value(i + 1, j + 1) +
                                        L.value(i, j + 1));
          const bool centre_above = centre > level;
          // code 5: corners 0 and 2 above; code 10: corners 1 and 3 above.
          const bool isolate_13 = (code == 5) == centre_above;
          if (isolate_13) {
            add(e0, e1);
            add(e2, e3);
          } else {
            add(e0, e3);
            add(e1, e2);
          }
          break;
        }
        default: break;
      }
    }
  }

  std::unordered_map<std::int64_t, std::array<int, 2>> incident;
  incident.reserve(segments.size() * 2);
  for (int s = 0; s < static_cast<int>(segments.size()); ++s) {
    for (std::int64_t e : segments[s]) {
      auto [it, inserted] = incident.try_emplace(e, std::array<int, 2>{s, -1});
      if (!inserted) it->second[1] = s;
    }
  }

  std::vector<std::uint8_t> used(segments.size(), 0);
  std::vector<Polyline> out;
  for (int s0 = 0; s0 < static_cast<int>(segments.size()); ++s0) {
    if (used[s0]) continue;
    Polyline poly;
    const std::int64_t start = std::min(segments[s0][0], segments[s0][1]);
    std::int64_t edge = start;
    int seg = s0;
    while (true) {
      used[seg] = 1;
      const Vec2 p = L.crossing(edge);
      if (poly.vertices.empty() || !(poly.vertices.back() == p)) poly.vertices.push_back(p);
      const std::int64_t next = (segments[seg][0] == edge) ? segments[seg][1] : segments[seg][0];
      if (next == start) break;
      const auto& inc = incident.at(next);
      const int nseg = (inc[0] == seg) ? inc[1] : inc[0];
      if (nseg < 0 || used[nseg]) break;
      edge = next;
      seg = nseg;
    }
    if (poly.vertices.size() > 1 && poly.vertices.front() == poly.vertices.back()) poly.vertices.pop_back();
    if (poly.vertices.size() >= 3) out.push_back(std::move(poly));
  }
  return out;
}

bool point_in_polygon(const Polyline& poly, Vec2 p) {
  bool inside = false;
  const auto& v = poly.vertices;
  const std::size_t n = v.size();
  for (std::size_t a = 0, b = n - 1; a < n; b = a++) {
    if ((v[a].y > p.y) != (v[b].y > p.y)) {
      const double xc = v[b].x + (p.y - v[b].y) * (v[a].x - v[b].x) / (v[a].y - v[b].y);
      if (p.x < xc) inside = !inside;
    }
  }
  return inside;
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return norm(p - (a + t * ab));
}

double point_polyline_distance(Vec2 p, const Polyline& poly) {
  const auto& v = poly.vertices;
  const std::size_t n = v.size();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) best = std::min(best, point_segment_distance(p, v[k], v[(k + 1) % n]));
  return best;
}

std::vector<std::uint8_t> fill_polygon(const Grid2& grid, const Polyline& poly) {
  std::vector<std::uint8_t> mark(grid.size(), 0);
  const auto& v = poly.vertices;
  const std::size_t n = v.size();
  std::vector<double> xs;
  for (int j = 0; j < grid.ny; ++j) {
    const double y = grid.y(j);
    xs.clear();
    for (std::size_t a = 0, b = n - 1; a < n; b = a++) {
      if ((v[a].y > y) != (v[b].y > y))
        xs.push_back(v[b].x + (y - v[b].y) * (v[a].x - v[b].x) / (v[a].y - v[b].y));
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      const int ilo = std::max(0, static_cast<int>(std::ceil((xs[k] - grid.x0) / grid.h)));
      const int ihi = std::min(grid.nx - 1, static_cast<int>(std::floor((xs[k + 1] - grid.x0) / grid.h)));
      for (int i = ilo; i <= ihi; ++i) {
        const double x = grid.x(i);
        if (x > xs[k] && x < xs[k + 1]) mark[grid.index(i, j)] = 1;
      }
    }
  }
  return mark;
}

Polyline refine(const Polyline& poly) {
  Polyline out;
  const auto& v = poly.vertices;
  const std::size_t n = v.size();
  out.vertices.reserve(2 * n);
  for (std::size_t k = 0; k < n; ++k) {
    out.vertices.push_back(v[k]);
    out.vertices.push_back(0.5 * (v[k] + v[(k + 1) % n]));
  }
  return out;
}

Polyline circle_polyline(Vec2 center, double radius, int n) {
  Polyline out;
  out.vertices.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double t = 2.0 * std::numbers::pi * k / n;
    out.vertices.push_back({center.x + radius * std::cos(t), center.y + radius * std::sin(t)});
  }
  return out;
}

}  // namespace eulerlab
