#include "hamflow/orbits.hpp"

#include <algorithm>
#include <cmath>

#include "probe_util.hpp"

namespace hamflow {

using detail::min_image;
using detail::UnitStepper;

const char* termination_name(Termination t) {
  switch (t) {
    case Termination::HitSingular: return "hit_singular";
    case Termination::HitEnd: return "hit_end";
    case Termination::Closed: return "closed";
    case Termination::StepCap: return "step_cap";
  }
  return "unknown";
}

const char* border_class_name(BorderClass b) {
  switch (b) {
    case BorderClass::HyperbolicBorder: return "hyperbolic_border";
    case BorderClass::EllipticBorder: return "elliptic_border";
    case BorderClass::ParabolicBorder: return "parabolic_border";
    case BorderClass::VirtuallyBorder: return "virtually_border";
  }
  return "unknown";
}

IntegrationParams default_integration(const VectorGrid& f, double speed_tol) {
  IntegrationParams ip;
  ip.speed_tol = speed_tol;
  ip.step = 0.25 * f.domain.min_spacing();
  ip.closure_tol = 0.5 * f.domain.min_spacing();
  ip.max_steps = 1000000;
  return ip;
}

std::vector<EndDescriptor> enumerate_ends(const GridDomain& d) {
  std::vector<EndDescriptor> out;
  auto is_end = [&](const std::optional<BoundaryPolicy>& p) {
    return p && *p == BoundaryPolicy::End;
  };
  if (!d.periodic_x && !d.periodic_y) {
    // counterclockwise perimeter order: bottom, right, top, left
    const int order[4] = {2, 1, 3, 0};
    const bool end_edge[4] = {is_end(d.bottom), is_end(d.right), is_end(d.top), is_end(d.left)};
    if (end_edge[0] && end_edge[1] && end_edge[2] && end_edge[3]) {
      out.push_back({0, {0, 1, 2, 3}});
      return out;
    }
    // maximal cyclic runs of end edges
    std::vector<int> run;
    auto flush = [&]() {
      if (!run.empty()) {
        EndDescriptor e;
        e.id = static_cast<int>(out.size());
        e.edges = run;
        out.push_back(e);
        run.clear();
      }
    };
    int start = -1;
    for (int i = 0; i < 4; ++i)
      if (!end_edge[i]) start = i;
    if (start < 0) return out;  // unreachable, handled above
    for (int k = 1; k <= 4; ++k) {
      int i = (start + k) % 4;
      if (end_edge[i])
        run.push_back(order[i]);
      else
        flush();
    }
    flush();
    return out;
  }
  if (d.periodic_x && !d.periodic_y) {
    if (is_end(d.bottom)) out.push_back({static_cast<int>(out.size()), {2}});
    if (is_end(d.top)) out.push_back({static_cast<int>(out.size()), {3}});
    return out;
  }
  if (!d.periodic_x && d.periodic_y) {
    if (is_end(d.left)) out.push_back({static_cast<int>(out.size()), {0}});
    if (is_end(d.right)) out.push_back({static_cast<int>(out.size()), {1}});
    return out;
  }
  return out;  // torus: no ends
}

StopMask build_stop_mask(const GridDomain& d, const std::vector<SingularCluster>& clusters) {
  StopMask m;
  m.ncx = d.cell_count_x();
  m.ncy = d.cell_count_y();
  m.owner.assign(static_cast<size_t>(m.ncx) * m.ncy, -1);
  for (const auto& cl : clusters) {
    for (int c : cl.cells) {
      int cx = c % m.ncx, cy = c / m.ncx;
      for (int oy = -1; oy <= 1; ++oy)
        for (int ox = -1; ox <= 1; ++ox) {
          int nx2 = cx + ox, ny2 = cy + oy;
          if (d.periodic_x) nx2 = (nx2 + m.ncx) % m.ncx;
          if (d.periodic_y) ny2 = (ny2 + m.ncy) % m.ncy;
          if (nx2 < 0 || nx2 >= m.ncx || ny2 < 0 || ny2 >= m.ncy) continue;
          m.owner[static_cast<size_t>(ny2) * m.ncx + nx2] = cl.id;
        }
    }
  }
  return m;
}

int exit_edge(const GridDomain& d, const Vec2& a, Vec2& b) {
  double best_t = 2.0;
  int best_edge = -1;
  auto consider = [&](int edge, double t, Vec2 q) {
    if (t >= -1e-12 && t < best_t) {
      best_t = t;
      best_edge = edge;
      b = q;
    }
  };
  Vec2 dir = b - a;
  if (!d.periodic_x) {
    if (b.x < d.x0 && dir.x < 0) {
      double t = (d.x0 - a.x) / dir.x;
      consider(0, t, {d.x0, a.y + t * dir.y});
    }
    if (b.x > d.xmax() && dir.x > 0) {
      double t = (d.xmax() - a.x) / dir.x;
      consider(1, t, {d.xmax(), a.y + t * dir.y});
    }
  }
  if (!d.periodic_y) {
    if (b.y < d.y0 && dir.y < 0) {
      double t = (d.y0 - a.y) / dir.y;
      consider(2, t, {a.x + t * dir.x, d.y0});
    }
    if (b.y > d.ymax() && dir.y > 0) {
      double t = (d.ymax() - a.y) / dir.y;
      consider(3, t, {a.x + t * dir.x, d.ymax()});
    }
  }
  return best_edge;
}

namespace {

int end_of_edge(const std::vector<EndDescriptor>& ends, int edge) {
  for (const auto& e : ends)
    for (int g : e.edges)
      if (g == edge) return e.id;
  return -1;
}

}  // namespace

Orbit integrate_orbit(const VectorGrid& f, const StopMask& stop,
                      const std::vector<EndDescriptor>& ends, Vec2 seed, Direction dir,
                      const IntegrationParams& ip) {
  const GridDomain& d = f.domain;
  if (!stop.empty() && stop.at_cell(d.cell_of(seed)) >= 0)
    throw Error(Errc::SeedSingular, "seed lies inside a singular cluster's stopping zone");

  Orbit o;
  o.points.push_back(d.wrap(seed));
  Vec2 start = d.wrap(seed);
  Vec2 v0 = f.sample(start);
  int sgn = dir == Direction::Forward ? +1 : -1;
  Vec2 dir0 = (v0 * sgn).normalized();

  UnitStepper st(f, ip.step, ip.speed_tol);
  Vec2 p = start;
  for (long n = 0; n < ip.max_steps; ++n) {
    Vec2 prev = p;
    if (!st.step(p, sgn)) {
      // stalled in a slow zone; attribute to the nearest cluster if adjacent
      int cell = d.cell_of(prev);
      int owner = stop.empty() ? -1 : stop.at_cell(cell);
      if (owner >= 0) {
        o.termination = Termination::HitSingular;
        o.hit_cluster = owner;
      } else {
        o.termination = Termination::StepCap;
      }
      return o;
    }
    o.length += ip.step;

    if (!d.inside(p)) {
      Vec2 clipped = p;
      int edge = exit_edge(d, prev, clipped);
      o.points.push_back(clipped);
      int end_id = edge >= 0 ? end_of_edge(ends, edge) : -1;
      if (end_id >= 0) {
        o.termination = Termination::HitEnd;
        o.hit_end = end_id;
      } else {
        o.termination = Termination::StepCap;  // ran onto an invariant edge
      }
      return o;
    }

    o.points.push_back(p);

    int owner = stop.empty() ? -1 : stop.at_cell(d.cell_of(p));
    if (owner >= 0) {
      o.termination = Termination::HitSingular;
      o.hit_cluster = owner;
      return o;
    }

    if (n > 8) {
      Vec2 off = min_image(d, start, p);
      if (off.norm() < ip.closure_tol) {
        Vec2 vh = (f.sample(p) * sgn).normalized();
        if (vh.dot(dir0) > 0.9) {
          o.termination = Termination::Closed;
          return o;
        }
      }
    }
  }
  o.termination = Termination::StepCap;
  return o;
}

// ---------------------------------------------------------------------------
// Separatrix tracing

namespace {

// Uniformly resampled copy, at most max_pts points, used for curve matching.
std::vector<Vec2> resample(const std::vector<Vec2>& pts, size_t max_pts) {
  if (pts.size() <= max_pts) return pts;
  std::vector<Vec2> out;
  out.reserve(max_pts);
  double stride = static_cast<double>(pts.size() - 1) / (max_pts - 1);
  for (size_t i = 0; i < max_pts; ++i)
    out.push_back(pts[static_cast<size_t>(std::lround(i * stride))]);
  return out;
}

double one_sided_hausdorff(const GridDomain& d, const std::vector<Vec2>& a,
                           const std::vector<Vec2>& b) {
  double worst = 0;
  for (const auto& p : a) {
    double best = 1e300;
    for (const auto& q : b) best = std::min(best, min_image(d, p, q).norm());
    worst = std::max(worst, best);
    if (worst > 1e200) break;
  }
  return worst;
}

double hausdorff(const GridDomain& d, const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  return std::max(one_sided_hausdorff(d, a, b), one_sided_hausdorff(d, b, a));
}

std::vector<Vec2> concat_oriented(const std::vector<Vec2>& head_reversed,
                                  const std::vector<Vec2>& tail) {
  std::vector<Vec2> out(head_reversed.rbegin(), head_reversed.rend());
  if (!tail.empty()) out.insert(out.end(), tail.begin() + 1, tail.end());
  return out;
}

}  // namespace

std::vector<Separatrix> trace_separatrices(const VectorGrid& f,
                                           const std::vector<SingularCluster>& clusters,
                                           const std::vector<SectorAnalysis>& sectors,
                                           const StopMask& stop,
                                           const std::vector<EndDescriptor>& ends,
                                           const IntegrationParams& ip) {
  const GridDomain& d = f.domain;
  std::vector<Separatrix> traced;

  for (size_t ci = 0; ci < clusters.size(); ++ci) {
    const SingularCluster& cl = clusters[ci];
    if (cl.degenerate()) continue;
    if (ci >= sectors.size()) continue;
    const SectorAnalysis& sa = sectors[ci];
    for (const auto& ray : sa.rays) {
      Vec2 dirv{std::cos(ray.angle), std::sin(ray.angle)};
      Vec2 seed = d.wrap(cl.centroid + dirv * sa.probe_radius);

      IntegrationParams near_ip = ip;
      near_ip.max_steps = std::max<long>(64, static_cast<long>(8 * sa.probe_radius / ip.step));

      Orbit near_part, far_part;
      try {
        if (ray.outgoing) {
          near_part = integrate_orbit(f, stop, ends, seed, Direction::Backward, near_ip);
          far_part = integrate_orbit(f, stop, ends, seed, Direction::Forward, ip);
        } else {
          near_part = integrate_orbit(f, stop, ends, seed, Direction::Forward, near_ip);
          far_part = integrate_orbit(f, stop, ends, seed, Direction::Backward, ip);
        }
      } catch (const Error& e) {
        if (e.code() == Errc::SeedSingular) continue;  // ray lies inside the stop zone
        throw;
      }

      if (near_part.termination != Termination::HitSingular) {
        // fall back: straight stub from the cluster rim to the seed
        near_part.points = {d.wrap(cl.centroid + dirv * cl.stop_radius(d)), seed};
        near_part.termination = Termination::HitSingular;
        near_part.hit_cluster = cl.id;
      }
      if (far_part.termination == Termination::StepCap)
        throw Error(Errc::UnresolvedSeparatrix,
                    "separatrix trace hit the step cap from seed (" + std::to_string(seed.x) +
                        ", " + std::to_string(seed.y) + ")");

      Separatrix s;
      if (ray.outgoing) {
        s.orbit.points = concat_oriented(near_part.points, far_part.points);
        s.orbit.termination = far_part.termination;
        s.source = near_part.endpoint();
        s.target = far_part.endpoint();
      } else {
        s.orbit.points = concat_oriented(far_part.points, near_part.points);
        s.orbit.termination = near_part.termination;
        s.source = far_part.endpoint();
        s.target = near_part.endpoint();
      }
      s.orbit.length = near_part.length + far_part.length;
      if (s.target.kind == EndpointRef::Kind::Singular) s.orbit.hit_cluster = s.target.id;
      if (s.target.kind == EndpointRef::Kind::End) s.orbit.hit_end = s.target.id;
      s.sector_side = ray.sector_side;
      if (s.source.is_end() || s.target.is_end())
        s.border_class = BorderClass::VirtuallyBorder;
      else if (ray.sector_side == 'H')
        s.border_class = BorderClass::HyperbolicBorder;
      else if (ray.sector_side == 'E')
        s.border_class = BorderClass::EllipticBorder;
      else
        s.border_class = BorderClass::ParabolicBorder;
      traced.push_back(std::move(s));
    }
  }

  // Deduplicate orbits traced from both of their ends.
  const double match_tol = 2.0 * d.max_spacing();
  std::vector<Separatrix> unique;
  std::vector<std::vector<Vec2>> unique_samples;
  for (auto& s : traced) {
    std::vector<Vec2> sample = resample(s.orbit.points, 600);
    bool dup = false;
    for (size_t k = 0; k < unique.size(); ++k) {
      const Separatrix& u = unique[k];
      bool same_refs = (u.source == s.source && u.target == s.target) ||
                       (u.source == s.target && u.target == s.source);
      if (!same_refs) continue;
      if (hausdorff(d, sample, unique_samples[k]) < match_tol) {
        dup = true;
        break;
      }
    }
    if (!dup) {
      unique_samples.push_back(std::move(sample));
      unique.push_back(std::move(s));
    }
  }
  for (size_t i = 0; i < unique.size(); ++i) unique[i].id = static_cast<int>(i);
  return unique;
}

// ---------------------------------------------------------------------------
// Closed orbits

std::optional<ClosedOrbit> detect_closed_orbit(const VectorGrid& f, const StopMask& stop,
                                               const std::vector<EndDescriptor>& ends, Vec2 seed,
                                               const IntegrationParams& ip) {
  Orbit rep = integrate_orbit(f, stop, ends, seed, Direction::Forward, ip);
  if (rep.termination != Termination::Closed) return std::nullopt;

  ClosedOrbit c;
  c.representative = rep;

  Vec2 w = f.sample(f.domain.wrap(seed)).normalized();
  Vec2 n = w.perp_ccw();
  double off = 2.0 * f.domain.max_spacing();
  bool closes[2] = {false, false};
  for (int side = 0; side < 2; ++side) {
    Vec2 probe_seed = f.domain.wrap(seed + n * (side == 0 ? off : -off));
    if (!f.domain.inside(probe_seed)) continue;
    IntegrationParams pip = ip;
    pip.max_steps = static_cast<long>(1.05 * rep.length / ip.step) + 16;
    try {
      Orbit probe = integrate_orbit(f, stop, ends, probe_seed, Direction::Forward, pip);
      closes[side] = probe.termination == Termination::Closed;
    } catch (const Error&) {
      closes[side] = false;
    }
  }
  c.is_limit_cycle = !(closes[0] && closes[1]);
  c.one_sided = closes[0] != closes[1];
  return c;
}

}  // namespace hamflow
