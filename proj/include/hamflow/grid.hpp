#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hamflow/errors.hpp"

namespace hamflow {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator-() const { return {-x, -y}; }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double norm() const { return std::sqrt(x * x + y * y); }
  Vec2 normalized() const {
    double n = norm();
    return n > 0 ? Vec2{x / n, y / n} : Vec2{0, 0};
  }
  // 90-degree counterclockwise rotation; for a Hamiltonian field this
  // points in the direction of increasing H.
  Vec2 perp_ccw() const { return {-y, x}; }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

enum class BoundaryPolicy { End, Invariant };

// Rectangular node grid. Non-periodic axes carry a boundary policy per edge;
// periodic axes wrap with period n*d (node n would alias node 0).
struct GridDomain {
  int nx = 0, ny = 0;
  double x0 = 0, y0 = 0, dx = 1, dy = 1;
  bool periodic_x = false, periodic_y = false;
  std::optional<BoundaryPolicy> left, right, bottom, top;

  void validate() const;

  double width() const { return periodic_x ? nx * dx : (nx - 1) * dx; }
  double height() const { return periodic_y ? ny * dy : (ny - 1) * dy; }
  double xmax() const { return x0 + width(); }
  double ymax() const { return y0 + height(); }
  Vec2 node(int ix, int iy) const { return {x0 + ix * dx, y0 + iy * dy}; }
  Vec2 center() const { return {x0 + width() / 2, y0 + height() / 2}; }
  double min_spacing() const { return std::min(dx, dy); }
  double max_spacing() const { return std::max(dx, dy); }

  // Wraps periodic coordinates into the fundamental domain.
  Vec2 wrap(Vec2 p) const;
  bool inside(const Vec2& p) const;
  bool compact() const { return periodic_x && periodic_y; }

  int cell_count_x() const { return periodic_x ? nx : nx - 1; }
  int cell_count_y() const { return periodic_y ? ny : ny - 1; }
  // Cell index of the cell containing p (cells are [x_i, x_{i+1}) squares).
  int cell_of(const Vec2& p) const;
  Vec2 cell_center(int cell) const;

  bool operator==(const GridDomain& o) const;
};

struct ScalarGrid {
  GridDomain domain;
  std::vector<double> values;  // row-major, index = iy*nx + ix

  void validate() const;
  double at(int ix, int iy) const { return values[static_cast<size_t>(iy) * domain.nx + ix]; }
  double& at(int ix, int iy) { return values[static_cast<size_t>(iy) * domain.nx + ix]; }
  // Bilinear interpolation; clamps to the boundary on non-periodic axes.
  double sample(Vec2 p) const;
  double min_value() const;
  double max_value() const;
  double range() const { return max_value() - min_value(); }
};

struct VectorGrid {
  GridDomain domain;
  std::vector<double> u, v;  // row-major components

  void validate() const;
  Vec2 at(int ix, int iy) const {
    size_t i = static_cast<size_t>(iy) * domain.nx + ix;
    return {u[i], v[i]};
  }
  Vec2 sample(Vec2 p) const;
  double max_speed() const;
};

// X = (dH/dy, -dH/dx), five-point interior stencils (exact through quartics),
// one-sided stencils at non-periodic edges, wrapped stencils on periodic axes.
VectorGrid hamiltonian_to_field(const ScalarGrid& h);

}  // namespace hamflow
