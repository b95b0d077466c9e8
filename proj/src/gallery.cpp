#include <cmath>
#include <functional>

#include "hamflow/fieldio.hpp"

namespace hamflow {

namespace {

constexpr double kPi = 3.14159265358979323846;

GridDomain plane_domain(int res) {
  GridDomain d;
  d.nx = d.ny = res;
  d.x0 = d.y0 = -2.0;
  d.dx = d.dy = 4.0 / (res - 1);
  d.left = d.right = d.bottom = d.top = BoundaryPolicy::End;
  return d;
}

ScalarGrid sample_scalar(const GridDomain& d, const std::function<double(double, double)>& h) {
  ScalarGrid g;
  g.domain = d;
  g.values.resize(static_cast<size_t>(d.nx) * d.ny);
  for (int iy = 0; iy < d.ny; ++iy)
    for (int ix = 0; ix < d.nx; ++ix) {
      Vec2 p = d.node(ix, iy);
      g.values[static_cast<size_t>(iy) * d.nx + ix] = h(p.x, p.y);
    }
  return g;
}

VectorGrid sample_field(const GridDomain& d, const std::function<Vec2(double, double)>& f) {
  VectorGrid g;
  g.domain = d;
  size_t n = static_cast<size_t>(d.nx) * d.ny;
  g.u.resize(n);
  g.v.resize(n);
  for (int iy = 0; iy < d.ny; ++iy)
    for (int ix = 0; ix < d.nx; ++ix) {
      Vec2 p = d.node(ix, iy);
      Vec2 w = f(p.x, p.y);
      size_t i = static_cast<size_t>(iy) * d.nx + ix;
      g.u[i] = w.x;
      g.v[i] = w.y;
    }
  return g;
}

FieldCase hamiltonian_case(const std::string& name, int res,
                           const std::function<double(double, double)>& h,
                           const std::string& notes) {
  FieldCase c;
  c.name = name;
  c.hamiltonian = sample_scalar(plane_domain(res), h);
  c.field = hamiltonian_to_field(*c.hamiltonian);
  c.expected_verdict = VerdictStatus::Hamiltonian;
  c.notes = notes;
  return c;
}

// Squared distance to the vertical segment {0} x [-1/2, 1/2].
double segment_dist2(double x, double y) {
  double m = std::max(0.0, std::abs(y) - 0.5);
  return x * x + m * m;
}

// Speed profile vanishing to sixth order on the zero set: smooth enough for
// sampling and flat enough that adjacent grid nodes fall under the default
// speed tolerance.
double bump_from_dist2(double d2) {
  double q = d2 / 0.09;  // sigma = 0.3
  return 1.0 - std::exp(-q * q * q);
}

// Depth-d one-dimensional Cantor approximation on [-1/2, 1/2]:
// squared distance to the union of 2^depth closed intervals.
double cantor_dist2(double x, double y, int depth) {
  double lo = -0.5, hi = 0.5;
  for (int k = 0; k < depth; ++k) {
    double third = (hi - lo) / 3.0;
    double a = lo + third, b = hi - third;
    if (x <= a) {
      hi = a;
    } else if (x >= b) {
      lo = b;
    } else {
      // inside a removed gap; the gap walls stay in the set at every depth
      double gap = std::min(x - a, b - x);
      return gap * gap + y * y;
    }
  }
  double ddx = x - std::clamp(x, lo, hi);
  return ddx * ddx + y * y;
}

}  // namespace

const std::vector<std::string>& gallery_names() {
  static const std::vector<std::string> names = {
      "uniform",    "center",     "saddle",         "monkey_saddle", "double_well",
      "fx_segment", "fx_cantor",  "parabolic_pair", "torus_shear"};
  return names;
}

FieldCase gallery(const std::string& name, int resolution) {
  if (resolution < 8) throw Error(Errc::UnknownCase, "gallery resolution must be at least 8");
  const int res = resolution;

  if (name == "uniform") {
    return hamiltonian_case(name, res, [](double, double y) { return y; },
                            "translation flow; every orbit runs boundary to boundary");
  }
  if (name == "center") {
    return hamiltonian_case(name, res,
                            [](double x, double y) { return 0.5 * (x * x + y * y); },
                            "rigid rotation about one center");
  }
  if (name == "saddle") {
    return hamiltonian_case(name, res, [](double x, double y) { return x * y; },
                            "linear saddle, four hyperbolic sectors");
  }
  if (name == "monkey_saddle") {
    return hamiltonian_case(name, res,
                            [](double x, double y) { return x * x * x - 3.0 * x * y * y; },
                            "degenerate saddle with six hyperbolic sectors");
  }
  if (name == "double_well") {
    return hamiltonian_case(
        name, res,
        [](double x, double y) { return (x * x - 1) * (x * x - 1) + y * y; },
        "two wells joined by a figure-eight saddle connection");
  }
  if (name == "fx_segment") {
    FieldCase c;
    c.name = name;
    c.field = sample_field(plane_domain(res), [](double x, double y) {
      return Vec2{bump_from_dist2(segment_dist2(x, y)), 0.0};
    });
    c.expected_verdict = VerdictStatus::OutOfHypothesis;
    c.notes =
        "horizontal flow stopped on the segment {0} x [-1/2,1/2]; the singular set is a "
        "closed interval, so the flow has no sector decomposition there. Gluing the outer "
        "uniform strips into an annulus would force a wandering area-preserving flow on a "
        "compact surface, so no smooth conserved quantity generates this flow.";
    return c;
  }
  if (name == "fx_cantor") {
    int depth = std::max(1, static_cast<int>(std::round(std::log2(static_cast<double>(res)))));
    FieldCase c;
    c.name = name;
    c.field = sample_field(plane_domain(res), [depth](double x, double y) {
      return Vec2{bump_from_dist2(cantor_dist2(x, y, depth)), 0.0};
    });
    c.expected_verdict = VerdictStatus::OutOfHypothesis;
    c.notes =
        "horizontal flow stopped on a finite-depth Cantor approximation (depth log2(resolution)) "
        "inside {y=0}; at grid scale the zero set appears as several degenerate clusters. The "
        "same annulus-gluing argument as for the segment case rules out a generating "
        "conserved quantity.";
    return c;
  }
  if (name == "parabolic_pair") {
    FieldCase c;
    c.name = name;
    c.field = sample_field(plane_domain(res), [](double x, double y) {
      return Vec2{x * x + y * y, 4.0 * x * y};
    });
    c.expected_verdict = VerdictStatus::NotHamiltonian;
    c.notes =
        "single singular point whose sector word is PHPH: an emanating parabolic bundle on "
        "the right, a converging one on the left, passing hyperbolic families above and "
        "below. A conserved quantity would have to take two different values at the point, "
        "so flows with parabolic sectors admit none.";
    return c;
  }
  if (name == "torus_shear") {
    GridDomain d;
    d.nx = d.ny = res;
    d.x0 = d.y0 = 0.0;
    d.dx = d.dy = 2.0 * kPi / res;
    d.periodic_x = d.periodic_y = true;
    FieldCase c;
    c.name = name;
    c.field = sample_field(d, [](double, double) { return Vec2{1.0, 0.0}; });
    c.expected_verdict = VerdictStatus::NotHamiltonian;
    c.notes =
        "every orbit is a closed loop around the torus; the flow preserves area but any "
        "generating function would have to decrease across the family of loops while "
        "returning to itself around the other handle.";
    return c;
  }
  throw Error(Errc::UnknownCase, "unknown gallery case " + name);
}

}  // namespace hamflow
