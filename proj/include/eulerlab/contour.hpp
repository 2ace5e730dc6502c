#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "eulerlab/grid.hpp"

namespace eulerlab {

/// Closed polyline; the closing segment back to the first vertex is implicit.
struct Polyline {
  std::vector<Vec2> vertices;

  std::size_t size() const { return vertices.size(); }
  /// Shoelace area, positive for counterclockwise traversal.
  double signed_area() const;
  double length() const;
  void reverse();
  /// Reorients in place so that signed_area() >= 0.
  void make_counterclockwise();
};

/// Marching squares on `values - level` with linear edge interpolation.
///
/// Nodes with value > level are "above". Values beyond the grid are treated as
/// below the level, so every returned polyline is closed. Saddle cells are
/// resolved by the sign of the cell-average value. Output order is
/// deterministic: polylines are emitted by their smallest crossing-edge index.
std::vector<Polyline> contour_lines(const Grid2& grid, std::span<const double> values, double level);

/// Crossing-number point-in-polygon test.
bool point_in_polygon(const Polyline& poly, Vec2 p);

/// Distance from p to the segment [a, b].
double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);

/// Minimum distance from p to any segment of the closed polyline.
double point_polyline_distance(Vec2 p, const Polyline& poly);

/// Marks nodes enclosed by the polygon (even-odd scanline fill).
std::vector<std::uint8_t> fill_polygon(const Grid2& grid, const Polyline& poly);

/// Inserts the midpoint of every segment.
Polyline refine(const Polyline& poly);

/// Vertices of a regular n-gon inscribed in the circle, counterclockwise.
Polyline circle_polyline(Vec2 center, double radius, int n);

}  // namespace eulerlab
