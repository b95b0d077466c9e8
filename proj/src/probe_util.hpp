#pragma once

#include <cmath>
#include <optional>

#include "hamflow/grid.hpp"

namespace hamflow::detail {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

inline double wrap_angle(double a) {
  while (a > kPi) a -= kTwoPi;
  while (a <= -kPi) a += kTwoPi;
  return a;
}

inline double wrap_positive(double a) {
  while (a < 0) a += kTwoPi;
  while (a >= kTwoPi) a -= kTwoPi;
  return a;
}

// Displacement from a to b, shortest image on periodic axes.
inline Vec2 min_image(const GridDomain& d, const Vec2& a, const Vec2& b) {
  Vec2 r = b - a;
  if (d.periodic_x) {
    double w = d.width();
    r.x -= w * std::round(r.x / w);
  }
  if (d.periodic_y) {
    double h = d.height();
    r.y -= h * std::round(r.y / h);
  }
  return r;
}

// Unit-speed RK4 stepper over the bilinear field; direction +1 follows the
// flow, -1 reverses it.
class UnitStepper {
 public:
  UnitStepper(const VectorGrid& f, double step, double speed_tol)
      : f_(f), h_(step), speed_tol_(speed_tol) {}

  double step_size() const { return h_; }

  // Advances p by one step; returns false when the speed drops under the
  // tolerance at any stage point (the step is then not taken).
  bool step(Vec2& p, int dir) const {
    auto vel = [&](const Vec2& q, Vec2& out) {
      Vec2 w = f_.sample(f_.domain.wrap(q));
      double n = w.norm();
      if (n < speed_tol_) return false;
      out = {dir * w.x / n, dir * w.y / n};
      return true;
    };
    Vec2 k1, k2, k3, k4;
    if (!vel(p, k1)) return false;
    if (!vel(p + k1 * (h_ / 2), k2)) return false;
    if (!vel(p + k2 * (h_ / 2), k3)) return false;
    if (!vel(p + k3 * h_, k4)) return false;
    p = p + (k1 + k2 * 2 + k3 * 2 + k4) * (h_ / 6);
    p = f_.domain.wrap(p);
    return true;
  }

 private:
  const VectorGrid& f_;
  double h_;
  double speed_tol_;
};

}  // namespace hamflow::detail
