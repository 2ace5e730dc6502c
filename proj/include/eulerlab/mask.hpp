#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "eulerlab/contour.hpp"
#include "eulerlab/grid.hpp"

namespace eulerlab {

/// Spatial hash over polyline segments for exact nearest-segment queries.
class SegmentIndex {
 public:
  SegmentIndex() = default;
  SegmentIndex(const std::vector<Polyline>& curves, double cell_size);

  struct Hit {
    double distance;
    int component;
  };
  /// Exact minimum distance to the indexed segments (and the owning component).
  Hit nearest(Vec2 p) const;
  bool empty() const { return segments_.empty(); }

 private:
  struct Segment {
    Vec2 a;
    Vec2 b;
    int component;
  };
  std::vector<Segment> segments_;
  std::vector<std::vector<int>> bins_;
  double x0_ = 0.0, y0_ = 0.0, cell_ = 1.0;
  int bx_ = 0, by_ = 0;
};

/// The flow domain: node membership, labelled boundary curves, distance field.
///
/// The mask is the positive set of a level function g (inside <=> g > 0); its
/// boundary curves are the zero contours of g. components[0] is the outer
/// boundary (largest enclosed area) and the rest are holes. All curves are
/// stored counterclockwise.
struct DomainMask {
  Grid2 grid;
  ScalarField level;
  std::vector<std::uint8_t> inside;
  std::vector<Polyline> components;
  std::vector<double> areas;
  /// Every non-outer component lies strictly inside components[0].
  bool nested = true;
  /// Nodes enclosed by the outer boundary (Omega together with its holes).
  std::vector<std::uint8_t> in_outer;
  /// d(x) = distance to the boundary curves inside Omega, 0 elsewhere.
  ScalarField distance;
  /// Index of the nearest boundary component per inside node, -1 elsewhere.
  std::vector<int> nearest_component;
  /// Support threshold used to build the mask, when it came from support_mask.
  std::optional<double> support_tol;

  std::size_t inside_count() const;
  std::size_t hole_count() const { return components.empty() ? 0 : components.size() - 1; }
  /// Point membership: inside the outer curve and outside every hole.
  bool contains(Vec2 p) const;
  /// Exact distance from an arbitrary point to the boundary curves (0 outside).
  double distance_at(Vec2 p) const;
  /// True for nodes inside a hole (enclosed by the outer curve but not in Omega).
  bool in_hole(std::size_t node) const { return in_outer[node] && !inside[node]; }

  SegmentIndex index;
};

/// Builds a mask from the positive set of g. Throws EmptyDomain if g <= 0
/// everywhere and Ambiguity if the two largest curves enclose areas within h^2.
DomainMask mask_from_level(const ScalarField& g);

/// Support of u: inside <=> |u| > tol.
DomainMask support_mask(const VectorField2& u, double tol);

/// Exact point-to-polyline distance for inside nodes, 0 outside.
ScalarField distance_field(const DomainMask& mask);

namespace serial {
/// Brute-force reference for distance_field (all segments, no spatial index).
ScalarField distance_field(const DomainMask& mask);
}  // namespace serial

/// Level functions for common test domains (positive inside).
ScalarField disk_level(const Grid2& g, Vec2 center, double radius);
ScalarField annulus_level(const Grid2& g, Vec2 center, double r_inner, double r_outer);
ScalarField box_level(const Grid2& g, double xmin, double xmax, double ymin, double ymax);

}  // namespace eulerlab
