#include "eulerlab/mask.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "eulerlab/parallel.hpp"

namespace eulerlab {

SegmentIndex::SegmentIndex(const std::vector<Polyline>& curves, double cell_size) : cell_(cell_size) {
  double xmin = std::numeric_limits<double>::infinity(), ymin = xmin;
  double xmax = -xmin, ymax = -xmin;
  for (int c = 0; c < static_cast<int>(curves.size()); ++c) {
    const auto& v = curves[c].vertices;
    for (std::size_t k = 0; k < v.size(); ++k) {
      segments_.push_back({v[k], v[(k + 1) % v.size()], c});
      xmin = std::min(xmin, v[k].x);
      xmax = std::max(xmax, v[k].x);
      ymin = std::min(ymin, v[k].y);
      ymax = std::max(ymax, v[k].y);
    }
  }
  if (segments_.empty()) return;
  x0_ = xmin - cell_;
  y0_ = ymin - cell_;
  bx_ = static_cast<int>(std::ceil((xmax - x0_) / cell_)) + 1;
  by_ = static_cast<int>(std::ceil((ymax - y0_) / cell_)) + 1;
  bins_.assign(static_cast<std::size_t>(bx_) * by_, {});
  for (int s = 0; s < static_cast<int>(segments_.size()); ++s) {
    const Segment& seg = segments_[s];
    const int i0 = static_cast<int>(std::floor((std::min(seg.a.x, seg.b.x) - x0_) / cell_));
    const int i1 = static_cast<int>(std::floor((std::max(seg.a.x, seg.b.x) - x0_) / cell_));
    const int j0 = static_cast<int>(std::floor((std::min(seg.a.y, seg.b.y) - y0_) / cell_));
    const int j1 = static_cast<int>(std::floor((std::max(seg.a.y, seg.b.y) - y0_) / cell_));
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) bins_[static_cast<std::size_t>(j) * bx_ + i].push_back(s);
  }
}

SegmentIndex::Hit SegmentIndex::nearest(Vec2 p) const {
  Hit best{std::numeric_limits<double>::infinity(), -1};
  if (segments_.empty()) return best;
  const int cx = std::clamp(static_cast<int>(std::floor((p.x - x0_) / cell_)), 0, bx_ - 1);
  const int cy = std::clamp(static_cast<int>(std::floor((p.y - y0_) / cell_)), 0, by_ - 1);
  auto visit = [&](int i, int j) {
    if (i < 0 || j < 0 || i >= bx_ || j >= by_) return;
    for (int s : bins_[static_cast<std::size_t>(j) * bx_ + i]) {
      const Segment& seg = segments_[s];
      const double d = point_segment_distance(p, seg.a, seg.b);
      if (d < best.distance) best = {d, seg.component};
    }
  };
  const int kmax = std::max(bx_, by_);
  for (int k = 0; k <= kmax; ++k) {
    if (k == 0) {
      visit(cx, cy);
    } else {
      for (int i = cx - k; i <= cx + k; ++i) {
        visit(i, cy - k);
        visit(i, cy + k);
      }
      for (int j = cy - k + 1; j <= cy + k - 1; ++j) {
        visit(cx - k, j);
        visit(cx + k, j);
      }
    }
    // Cells in ring k+1 and beyond are at least k*cell away from the projection of p.
    if (best.distance <= k * cell_) break;
  }
  return best;
}

std::size_t DomainMask::inside_count() const {
  return static_cast<std::size_t>(std::count(inside.begin(), inside.end(), std::uint8_t{1}));
}

bool DomainMask::contains(Vec2 p) const {
  if (components.empty() || !point_in_polygon(components[0], p)) return false;
  for (std::size_t c = 1; c < components.size(); ++c)
    if (point_in_polygon(components[c], p)) return false;
  return true;
}

double DomainMask::distance_at(Vec2 p) const {
  if (!contains(p)) return 0.0;
  return index.nearest(p).distance;
}

namespace {

void fill_distance(DomainMask& m) {
  m.distance = distance_field(m);
  m.nearest_component.assign(m.grid.size(), -1);
  for (std::size_t k = 0; k < m.grid.size(); ++k)
    if (m.inside[k]) m.nearest_component[k] = m.index.nearest(m.grid.node(k)).component;
}

}  // namespace

DomainMask mask_from_level(const ScalarField& g) {
  DomainMask m;
  m.grid = g.grid;
  m.level = g;
  m.inside.assign(g.grid.size(), 0);
  for (std::size_t k = 0; k < g.grid.size(); ++k) m.inside[k] = g[k] > 0.0 ? 1 : 0;
  if (m.inside_count() == 0) fail(ErrorKind::EmptyDomain, "domain is empty: level function is nowhere positive");

  auto curves = contour_lines(g.grid, g.values, 0.0);
  for (auto& c : curves) c.make_counterclockwise();
  std::vector<std::size_t> order(curves.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return curves[a].signed_area() > curves[b].signed_area();
  });
  for (std::size_t k : order) {
    m.areas.push_back(curves[k].signed_area());
    m.components.push_back(std::move(curves[k]));
  }
  const double h2 = g.grid.h * g.grid.h;
  if (m.components.size() >= 2 && m.areas[0] - m.areas[1] <= h2)
    fail(ErrorKind::Ambiguity, "outer boundary is ambiguous: two largest components enclose equal areas");
  for (std::size_t c = 1; c < m.components.size(); ++c)
    if (!point_in_polygon(m.components[0], m.components[c].vertices.front())) m.nested = false;

  m.in_outer = fill_polygon(g.grid, m.components[0]);
  for (std::size_t k = 0; k < g.grid.size(); ++k)
    if (m.inside[k]) m.in_outer[k] = 1;
  m.index = SegmentIndex(m.components, 4.0 * g.grid.h);
  fill_distance(m);
  return m;
}

DomainMask support_mask(const VectorField2& u, double tol) {
  require(tol > 0.0, "support_mask: tol must be positive");
  ScalarField g(u.grid);
  for (std::size_t k = 0; k < g.values.size(); ++k) g[k] = norm(u[k]) - tol;
  DomainMask m = mask_from_level(g);
  m.support_tol = tol;
  return m;
}

ScalarField distance_field(const DomainMask& mask) {
  ScalarField d(mask.grid, 0.0);
  const Grid2& g = mask.grid;
  const int threads = thread_limit();
#pragma omp parallel for schedule(dynamic, 8) num_threads(threads) if (threads > 1)
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t k = g.index(i, j);
      if (mask.inside[k]) d[k] = mask.index.nearest(g.node(i, j)).distance;
    }
  return d;
}

namespace serial {
ScalarField distance_field(const DomainMask& mask) {
  ScalarField d(mask.grid, 0.0);
  for (std::size_t k = 0; k < mask.grid.size(); ++k) {
    if (!mask.inside[k]) continue;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : mask.components) best = std::min(best, point_polyline_distance(mask.grid.node(k), c));
    d[k] = best;
  }
  return d;
}
}  // namespace serial

ScalarField disk_level(const Grid2& g, Vec2 center, double radius) {
  return sample_scalar(g, [&](Vec2 p) { return radius - norm(p - center); });
}

ScalarField annulus_level(const Grid2& g, Vec2 center, double r_inner, double r_outer) {
  return sample_scalar(g, [&](Vec2 p) {
    const double r = norm(p - center);
    return std::min(r - r_inner, r_outer - r);
  });
}

ScalarField box_level(const Grid2& g, double xmin, double xmax, double ymin, double ymax) {
  return sample_scalar(g, [&](Vec2 p) {
    return std::min({p.x - xmin, xmax - p.x, p.y - ymin, ymax - p.y});
  });
}

}  // namespace eulerlab
