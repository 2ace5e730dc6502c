#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "eulerlab/errors.hpp"

namespace eulerlab {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
/// Counterclockwise quarter turn: (a, b) -> (-b, a).
inline Vec2 perp(Vec2 a) { return {-a.y, a.x}; }

/// Uniform isotropic node grid; node (i, j) sits at (x0 + i h, y0 + j h).
struct Grid2 {
  double x0 = 0.0;
  double y0 = 0.0;
  double h = 1.0;
  int nx = 0;
  int ny = 0;

  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i);
  }
  double x(int i) const { return x0 + i * h; }
  double y(int j) const { return y0 + j * h; }
  Vec2 node(int i, int j) const { return {x(i), y(j)}; }
  Vec2 node(std::size_t k) const {
    return node(static_cast<int>(k % static_cast<std::size_t>(nx)),
                static_cast<int>(k / static_cast<std::size_t>(nx)));
  }
  double x_max() const { return x(nx - 1); }
  double y_max() const { return y(ny - 1); }
  bool interior(int i, int j) const { return i > 0 && j > 0 && i < nx - 1 && j < ny - 1; }
  bool contains(Vec2 p) const {
    return p.x >= x0 && p.x <= x_max() && p.y >= y0 && p.y <= y_max();
  }
  /// Indices of the node nearest to p, clamped to the grid.
  std::size_t nearest(Vec2 p) const;

  friend bool operator==(const Grid2& a, const Grid2& b) {
    return a.x0 == b.x0 && a.y0 == b.y0 && a.h == b.h && a.nx == b.nx && a.ny == b.ny;
  }
};

/// Validated constructor; throws InvalidArgument for h <= 0 or fewer than 3 nodes per axis.
Grid2 make_grid(double x0, double y0, double h, int nx, int ny);

/// Smallest grid with spacing h whose node box covers [xmin, xmax] x [ymin, ymax].
Grid2 covering_grid(double xmin, double xmax, double ymin, double ymax, double h);

struct ScalarField {
  Grid2 grid;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(const Grid2& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}
  ScalarField(const Grid2& g, std::vector<double> v);

  double& operator()(int i, int j) { return values[grid.index(i, j)]; }
  double operator()(int i, int j) const { return values[grid.index(i, j)]; }
  double& operator[](std::size_t k) { return values[k]; }
  double operator[](std::size_t k) const { return values[k]; }

  /// Bilinear interpolation; p must lie inside the grid box.
  double sample(Vec2 p) const;
};

struct VectorField2 {
  Grid2 grid;
  std::vector<Vec2> values;

  VectorField2() = default;
  explicit VectorField2(const Grid2& g) : grid(g), values(g.size()) {}
  VectorField2(const Grid2& g, std::vector<Vec2> v);

  Vec2& operator()(int i, int j) { return values[grid.index(i, j)]; }
  Vec2 operator()(int i, int j) const { return values[grid.index(i, j)]; }
  Vec2& operator[](std::size_t k) { return values[k]; }
  Vec2 operator[](std::size_t k) const { return values[k]; }

  Vec2 sample(Vec2 p) const;
  /// Pointwise Euclidean norm.
  ScalarField magnitude() const;
  double max_norm() const;
};

template <class F>
ScalarField sample_scalar(const Grid2& g, F&& fn) {
  ScalarField out(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) out(i, j) = fn(g.node(i, j));
  return out;
}

template <class F>
VectorField2 sample_vector(const Grid2& g, F&& fn) {
  VectorField2 out(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) out(i, j) = fn(g.node(i, j));
  return out;
}

void require_same_grid(const Grid2& a, const Grid2& b, const char* what);

}  // namespace eulerlab
