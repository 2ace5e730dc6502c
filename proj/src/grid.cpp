#include "eulerlab/grid.hpp"

#include <algorithm>
#include <string>

namespace eulerlab {

Grid2 make_grid(double x0, double y0, double h, int nx, int ny) {
  require(std::isfinite(x0) && std::isfinite(y0), "grid origin must be finite");
  require(std::isfinite(h) && h > 0.0, "grid spacing must be positive");
  require(nx >= 3 && ny >= 3, "grid needs at least 3 nodes per axis");
  return Grid2{x0, y0, h, nx, ny};
}

Grid2 covering_grid(double xmin, double xmax, double ymin, double ymax, double h) {
  require(h > 0.0 && xmax > xmin && ymax > ymin, "covering_grid: empty box");
  const int nx = static_cast<int>(std::ceil((xmax - xmin) / h - 1e-9)) + 1;
  const int ny = static_cast<int>(std::ceil((ymax - ymin) / h - 1e-9)) + 1;
  const double cx = 0.5 * (xmin + xmax);
  const double cy = 0.5 * (ymin + ymax);
  return make_grid(cx - 0.5 * (nx - 1) * h, cy - 0.5 * (ny - 1) * h, h, nx, ny);
}

std::size_t Grid2::nearest(Vec2 p) const {
  const int i = std::clamp(static_cast<int>(std::lround((p.x - x0) / h)), 0, nx - 1);
  const int j = std::clamp(static_cast<int>(std::lround((p.y - y0) / h)), 0, ny - 1);
  return index(i, j);
}

void require_same_grid(const Grid2& a, const Grid2& b, const char* what) {
  if (!(a == b)) fail(ErrorKind::InvalidArgument, std::string(what) + ": fields live on different grids");
}

ScalarField::ScalarField(const Grid2& g, std::vector<double> v) : grid(g), values(std::move(v)) {
  require(values.size() == grid.size(), "scalar field size does not match grid");
}

VectorField2::VectorField2(const Grid2& g, std::vector<Vec2> v) : grid(g), values(std::move(v)) {
  require(values.size() == grid.size(), "vector field size does not match grid");
}

namespace {

struct Cell {
  int i;
  int j;
  double tx;
  double ty;
};

Cell locate(const Grid2& g, Vec2 p) {
  const double fx = (p.x - g.x0) / g.h;
  const double fy = (p.y - g.y0) / g.h;
  const int i = std::clamp(static_cast<int>(std::floor(fx)), 0, g.nx - 2);
  const int j = std::clamp(static_cast<int>(std::floor(fy)), 0, g.ny - 2);
  return {i, j, fx - i, fy - j};
}

}  // namespace

double ScalarField::sample(Vec2 p) const {
  const Cell c = locate(grid, p);
  const double v00 = (*this)(c.i, c.j);
  const double v10 = (*this)(c.i + 1, c.j);
  const double v01 = (*this)(c.i, c.j + 1);
  const double v11 = (*this)(c.i + 1, c.j + 1);
  return (1 - c.ty) * ((1 - c.tx) * v00 + c.tx * v10) + c.ty * ((1 - c.tx) * v01 + c.tx * v11);
}

Vec2 VectorField2::sample(Vec2 p) const {
  const Cell c = locate(grid, p);
  const Vec2 v00 = (*this)(c.i, c.j);
  const Vec2 v10 = (*this)(c.i + 1, c.j);
  const Vec2 v01 = (*this)(c.i, c.j + 1);
  const Vec2 v11 = (*this)(c.i + 1, c.j + 1);
  return (1 - c.ty) * ((1 - c.tx) * v00 + c.tx * v10) + c.ty * ((1 - c.tx) * v01 + c.tx * v11);
}

ScalarField VectorField2::magnitude() const {
  ScalarField out(grid);
  for (std::size_t k = 0; k < values.size(); ++k) out[k] = norm(values[k]);
  return out;
}

double VectorField2::max_norm() const {
  double m = 0.0;
  for (const Vec2& v : values) m = std::max(m, norm(v));
  return m;
}

}  // namespace eulerlab
