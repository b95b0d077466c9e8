#include "hamflow/grid.hpp"

#include <algorithm>
#include <cmath>

namespace hamflow {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::MalformedFile: return "MalformedFile";
    case Errc::NonFiniteValue: return "NonFiniteValue";
    case Errc::BadDimensions: return "BadDimensions";
    case Errc::UnknownCase: return "UnknownCase";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::ZeroOnLoop: return "ZeroOnLoop";
    case Errc::NonConvergent: return "NonConvergent";
    case Errc::Ambiguous: return "Ambiguous";
    case Errc::Inconsistent: return "Inconsistent";
    case Errc::UnresolvedEnd: return "UnresolvedEnd";
    case Errc::SeedSingular: return "SeedSingular";
    case Errc::UnresolvedSeparatrix: return "UnresolvedSeparatrix";
    case Errc::UnclassifiableRegion: return "UnclassifiableRegion";
    case Errc::SideAmbiguous: return "SideAmbiguous";
    case Errc::MultiVertexSide: return "MultiVertexSide";
    case Errc::NotHamiltonian: return "NotHamiltonian";
    case Errc::TooLarge: return "TooLarge";
    case Errc::UnrealizableSpec: return "UnrealizableSpec";
    case Errc::RoundTripMismatch: return "RoundTripMismatch";
    case Errc::IncompleteAnalysis: return "IncompleteAnalysis";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

void GridDomain::validate() const {
  if (nx < 4 || ny < 4) throw Error(Errc::BadDimensions, "grid needs nx>=4 and ny>=4");
  if (!(dx > 0) || !(dy > 0)) throw Error(Errc::MalformedFile, "dx and dy must be positive");
  if (!std::isfinite(x0) || !std::isfinite(y0) || !std::isfinite(dx) || !std::isfinite(dy))
    throw Error(Errc::NonFiniteValue, "domain parameters must be finite");
  if (periodic_x && (left || right))
    throw Error(Errc::MalformedFile, "periodic x axis must not carry a boundary policy");
  if (periodic_y && (bottom || top))
    throw Error(Errc::MalformedFile, "periodic y axis must not carry a boundary policy");
  if (!periodic_x && (!left || !right))
    throw Error(Errc::MalformedFile, "non-periodic x axis needs left and right boundary policies");
  if (!periodic_y && (!bottom || !top))
    throw Error(Errc::MalformedFile, "non-periodic y axis needs bottom and top boundary policies");
}

Vec2 GridDomain::wrap(Vec2 p) const {
  if (periodic_x) {
    double w = width();
    p.x = x0 + std::fmod(std::fmod(p.x - x0, w) + w, w);
  }
  if (periodic_y) {
    double h = height();
    p.y = y0 + std::fmod(std::fmod(p.y - y0, h) + h, h);
  }
  return p;
}

bool GridDomain::inside(const Vec2& p) const {
  if (!periodic_x && (p.x < x0 || p.x > xmax())) return false;
  if (!periodic_y && (p.y < y0 || p.y > ymax())) return false;
  return true;
}

bool GridDomain::operator==(const GridDomain& o) const {
  return nx == o.nx && ny == o.ny && x0 == o.x0 && y0 == o.y0 && dx == o.dx && dy == o.dy &&
         periodic_x == o.periodic_x && periodic_y == o.periodic_y && left == o.left &&
         right == o.right && bottom == o.bottom && top == o.top;
}

int GridDomain::cell_of(const Vec2& q) const {
  Vec2 p = wrap(q);
  int cx = static_cast<int>(std::floor((p.x - x0) / dx));
  int cy = static_cast<int>(std::floor((p.y - y0) / dy));
  cx = std::clamp(cx, 0, cell_count_x() - 1);
  cy = std::clamp(cy, 0, cell_count_y() - 1);
  return cy * cell_count_x() + cx;
}

Vec2 GridDomain::cell_center(int cell) const {
  int cx = cell % cell_count_x();
  int cy = cell / cell_count_x();
  return {x0 + (cx + 0.5) * dx, y0 + (cy + 0.5) * dy};
}

void ScalarGrid::validate() const {
  domain.validate();
  if (values.size() != static_cast<size_t>(domain.nx) * domain.ny)
    throw Error(Errc::BadDimensions, "scalar array length differs from nx*ny");
  for (double x : values)
    if (!std::isfinite(x)) throw Error(Errc::NonFiniteValue, "scalar grid holds NaN or Inf");
}

namespace {

// Weights and neighbor offsets for bilinear sampling on one axis.
struct AxisSample {
  int i0, i1;
  double t;
};

AxisSample axis_sample(double coord, double origin, double d, int n, bool periodic) {
  double s = (coord - origin) / d;
  if (periodic) {
    double w = static_cast<double>(n);
    s = std::fmod(std::fmod(s, w) + w, w);
    int i0 = static_cast<int>(std::floor(s));
    if (i0 >= n) i0 = n - 1;
    return {i0, (i0 + 1) % n, s - i0};
  }
  if (s <= 0) return {0, 0, 0.0};
  if (s >= n - 1) return {n - 1, n - 1, 0.0};
  int i0 = static_cast<int>(std::floor(s));
  if (i0 >= n - 1) i0 = n - 2;
  return {i0, i0 + 1, s - i0};
}

}  // namespace

double ScalarGrid::sample(Vec2 p) const {
  AxisSample ax = axis_sample(p.x, domain.x0, domain.dx, domain.nx, domain.periodic_x);
  AxisSample ay = axis_sample(p.y, domain.y0, domain.dy, domain.ny, domain.periodic_y);
  double f00 = at(ax.i0, ay.i0), f10 = at(ax.i1, ay.i0);
  double f01 = at(ax.i0, ay.i1), f11 = at(ax.i1, ay.i1);
  double fx0 = f00 + (f10 - f00) * ax.t;
  double fx1 = f01 + (f11 - f01) * ax.t;
  return fx0 + (fx1 - fx0) * ay.t;
}

double ScalarGrid::min_value() const { return *std::min_element(values.begin(), values.end()); }
double ScalarGrid::max_value() const { return *std::max_element(values.begin(), values.end()); }

void VectorGrid::validate() const {
  domain.validate();
  size_t n = static_cast<size_t>(domain.nx) * domain.ny;
  if (u.size() != n || v.size() != n)
    throw Error(Errc::BadDimensions, "component array length differs from nx*ny");
  for (double x : u)
    if (!std::isfinite(x)) throw Error(Errc::NonFiniteValue, "u holds NaN or Inf");
  for (double x : v)
    if (!std::isfinite(x)) throw Error(Errc::NonFiniteValue, "v holds NaN or Inf");
}

Vec2 VectorGrid::sample(Vec2 p) const {
  AxisSample ax = axis_sample(p.x, domain.x0, domain.dx, domain.nx, domain.periodic_x);
  AxisSample ay = axis_sample(p.y, domain.y0, domain.dy, domain.ny, domain.periodic_y);
  auto lerp2 = [&](const std::vector<double>& f) {
    double f00 = f[static_cast<size_t>(ay.i0) * domain.nx + ax.i0];
    double f10 = f[static_cast<size_t>(ay.i0) * domain.nx + ax.i1];
    double f01 = f[static_cast<size_t>(ay.i1) * domain.nx + ax.i0];
    double f11 = f[static_cast<size_t>(ay.i1) * domain.nx + ax.i1];
    double fx0 = f00 + (f10 - f00) * ax.t;
    double fx1 = f01 + (f11 - f01) * ax.t;
    return fx0 + (fx1 - fx0) * ay.t;
  };
  return {lerp2(u), lerp2(v)};
}

double VectorGrid::max_speed() const {
  double m = 0;
  for (size_t i = 0; i < u.size(); ++i) m = std::max(m, std::hypot(u[i], v[i]));
  return m;
}

namespace {

// Derivative of the degree-4 interpolant through five consecutive nodes,
// evaluated at node `at` (0..4). Exact for polynomials through degree 4.
constexpr double kStencil5[5][5] = {
    {-25.0 / 12, 4.0, -3.0, 4.0 / 3, -1.0 / 4},
    {-1.0 / 4, -5.0 / 6, 3.0 / 2, -1.0 / 2, 1.0 / 12},
    {1.0 / 12, -2.0 / 3, 0.0, 2.0 / 3, -1.0 / 12},
    {-1.0 / 12, 1.0 / 2, -3.0 / 2, 5.0 / 6, 1.0 / 4},
    {1.0 / 4, -4.0 / 3, 3.0, -4.0, 25.0 / 12},
};

}  // namespace

VectorGrid hamiltonian_to_field(const ScalarGrid& h) {
  h.validate();
  const GridDomain& d = h.domain;
  VectorGrid f;
  f.domain = d;
  size_t n = static_cast<size_t>(d.nx) * d.ny;
  f.u.assign(n, 0.0);
  f.v.assign(n, 0.0);

  auto deriv = [&](int i, int m, bool periodic, auto value) {
    if (periodic) {
      double s = 0;
      for (int k = -2; k <= 2; ++k) s += kStencil5[2][k + 2] * value(((i + k) % m + m) % m);
      return s;
    }
    int base = std::clamp(i - 2, 0, m - 5);
    int at = i - base;
    double s = 0;
    for (int k = 0; k < 5; ++k) s += kStencil5[at][k] * value(base + k);
    return s;
  };

  for (int iy = 0; iy < d.ny; ++iy) {
    for (int ix = 0; ix < d.nx; ++ix) {
      double hx = deriv(ix, d.nx, d.periodic_x, [&](int i) { return h.at(i, iy); }) / d.dx;
      double hy = deriv(iy, d.ny, d.periodic_y, [&](int i) { return h.at(ix, i); }) / d.dy;
      size_t idx = static_cast<size_t>(iy) * d.nx + ix;
      f.u[idx] = hy;
      f.v[idx] = -hx;
    }
  }
  return f;
}

}  // namespace hamflow
