#include "hamflow/singular.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "probe_util.hpp"

namespace hamflow {

using detail::kPi;
using detail::kTwoPi;
using detail::min_image;
using detail::UnitStepper;
using detail::wrap_angle;
using detail::wrap_positive;

double default_speed_tol(const VectorGrid& f) { return 1e-6 * f.max_speed(); }

const char* sing_kind_name(SingKind k) {
  switch (k) {
    case SingKind::Center: return "center";
    case SingKind::MultiSaddle: return "multi_saddle";
    case SingKind::Sectored: return "sectored";
    case SingKind::Degenerate: return "degenerate";
  }
  return "unknown";
}

int SectorWord::count(char c) const {
  return static_cast<int>(std::count(letters.begin(), letters.end(), c));
}

std::string SectorWord::normalized() const {
  if (letters.empty()) return "";
  std::string best = letters;
  std::string rot = letters;
  for (size_t i = 1; i < letters.size(); ++i) {
    std::rotate(rot.begin(), rot.begin() + 1, rot.end());
    if (rot < best) best = rot;
  }
  return best;
}

SectorWord SectorWord::reversed() const {
  SectorWord w;
  w.letters = std::string(letters.rbegin(), letters.rend());
  return w;
}

// ---------------------------------------------------------------------------
// Winding numbers

namespace {

double angle_increment(const VectorGrid& f, const Vec2& a, const Vec2& b, double speed_tol,
                       int depth) {
  Vec2 wa = f.sample(f.domain.wrap(a));
  Vec2 wb = f.sample(f.domain.wrap(b));
  if (wa.norm() < speed_tol || wb.norm() < speed_tol)
    throw Error(Errc::ZeroOnLoop, "field drops under the speed tolerance on the loop");
  double d = std::atan2(wa.x * wb.y - wa.y * wb.x, wa.dot(wb));
  if (std::abs(d) < kPi / 2) return d;
  if (depth >= 20)
    throw Error(Errc::NonConvergent, "winding refinement exceeded depth 20; a zero crosses the loop");
  Vec2 m = a + min_image(f.domain, a, b) * 0.5;
  return angle_increment(f, a, m, speed_tol, depth + 1) +
         angle_increment(f, m, b, speed_tol, depth + 1);
}

}  // namespace

int poincare_index(const VectorGrid& f, const std::vector<Vec2>& loop, double speed_tol) {
  if (loop.size() < 3) throw Error(Errc::BadDimensions, "winding loop needs at least 3 points");
  double total = 0;
  for (size_t i = 0; i < loop.size(); ++i)
    total += angle_increment(f, loop[i], loop[(i + 1) % loop.size()], speed_tol, 0);
  double turns = total / kTwoPi;
  long n = std::lround(turns);
  if (std::abs(turns - n) > 0.25)
    throw Error(Errc::NonConvergent, "winding sum is not close to an integer");
  return static_cast<int>(n);
}

// ---------------------------------------------------------------------------
// Cluster detection

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

// True when all vectors fit in an open half-plane (winding then vanishes).
bool half_plane(const Vec2* w, int n) {
  double ang[8];
  for (int i = 0; i < n; ++i) ang[i] = std::atan2(w[i].y, w[i].x);
  std::sort(ang, ang + n);
  double max_gap = ang[0] + kTwoPi - ang[n - 1];
  for (int i = 1; i < n; ++i) max_gap = std::max(max_gap, ang[i] - ang[i - 1]);
  return max_gap > kPi + 1e-12;
}

}  // namespace

std::vector<SingularCluster> detect_singular_cells(const VectorGrid& f, double speed_tol) {
  const GridDomain& d = f.domain;
  const int ncx = d.cell_count_x(), ncy = d.cell_count_y();
  const int ncells = ncx * ncy;

  std::vector<double> speed(static_cast<size_t>(d.nx) * d.ny);
  for (int iy = 0; iy < d.ny; ++iy)
    for (int ix = 0; ix < d.nx; ++ix)
      speed[static_cast<size_t>(iy) * d.nx + ix] = f.at(ix, iy).norm();

  auto node_wrap = [&](int ix, int iy) -> std::pair<int, int> {
    if (d.periodic_x) ix %= d.nx;
    if (d.periodic_y) iy %= d.ny;
    return {ix, iy};
  };

  std::vector<char> flagged(ncells, 0);
  for (int cy = 0; cy < ncy; ++cy) {
    for (int cx = 0; cx < ncx; ++cx) {
      Vec2 w[4];
      double smin = 1e300;
      int corner = 0;
      for (int oy = 0; oy <= 1; ++oy)
        for (int ox = 0; ox <= 1; ++ox) {
          auto [ix, iy] = node_wrap(cx + ox, cy + oy);
          w[corner++] = f.at(ix, iy);
          smin = std::min(smin, speed[static_cast<size_t>(iy) * d.nx + ix]);
        }
      bool flag = smin < speed_tol;
      if (!flag && !half_plane(w, 4)) {
        std::vector<Vec2> loop = {d.node(cx, cy), d.node(cx + 1, cy), d.node(cx + 1, cy + 1),
                                  d.node(cx, cy + 1)};
        try {
          flag = poincare_index(f, loop, speed_tol) != 0;
        } catch (const Error&) {
          flag = true;  // a zero interferes with the cell boundary
        }
      }
      if (flag) flagged[cy * ncx + cx] = 1;
    }
  }

  UnionFind uf(ncells);
  for (int cy = 0; cy < ncy; ++cy)
    for (int cx = 0; cx < ncx; ++cx) {
      if (!flagged[cy * ncx + cx]) continue;
      auto try_join = [&](int ox, int oy) {
        int nx2 = cx + ox, ny2 = cy + oy;
        if (d.periodic_x) nx2 = (nx2 + ncx) % ncx;
        if (d.periodic_y) ny2 = (ny2 + ncy) % ncy;
        if (nx2 < 0 || nx2 >= ncx || ny2 < 0 || ny2 >= ncy) return;
        if (flagged[ny2 * ncx + nx2]) uf.unite(cy * ncx + cx, ny2 * ncx + nx2);
      };
      try_join(1, 0);
      try_join(0, 1);
    }

  std::vector<int> root_to_cluster(ncells, -1);
  std::vector<SingularCluster> clusters;
  for (int c = 0; c < ncells; ++c) {
    if (!flagged[c]) continue;
    int r = uf.find(c);
    if (root_to_cluster[r] < 0) {
      root_to_cluster[r] = static_cast<int>(clusters.size());
      clusters.emplace_back();
    }
    clusters[root_to_cluster[r]].cells.push_back(c);
  }

  for (auto& cl : clusters) {
    std::sort(cl.cells.begin(), cl.cells.end());
    Vec2 anchor = d.cell_center(cl.cells.front());
    Vec2 acc{0, 0};
    for (int c : cl.cells) acc = acc + min_image(d, anchor, d.cell_center(c));
    cl.centroid = d.wrap(anchor + acc * (1.0 / cl.cells.size()));

    int diam = 0;
    auto cxy = [&](int c) { return std::pair<int, int>{c % ncx, c / ncx}; };
    for (size_t i = 0; i < cl.cells.size(); ++i)
      for (size_t j = i + 1; j < cl.cells.size(); ++j) {
        auto [ax, ay] = cxy(cl.cells[i]);
        auto [bx, by] = cxy(cl.cells[j]);
        int ddx = std::abs(ax - bx), ddy = std::abs(ay - by);
        if (d.periodic_x) ddx = std::min(ddx, ncx - ddx);
        if (d.periodic_y) ddy = std::min(ddy, ncy - ddy);
        diam = std::max(diam, std::max(ddx, ddy));
      }
    cl.diameter_cells = diam;

    double rad = 0;
    for (int c : cl.cells) {
      Vec2 ctr = d.cell_center(c);
      Vec2 off = min_image(d, cl.centroid, ctr);
      rad = std::max(rad, off.norm() + 0.5 * std::hypot(d.dx, d.dy));
    }
    cl.radius = rad;
  }

  // Winding number of a rectangle loop just outside the cluster.
  for (auto& cl : clusters) {
    cl.winding_valid = false;
    int lx = ncx, ly = ncy, hx = -1, hy = -1;
    // Unwrap cell coordinates relative to the first cell for a tight box.
    auto cxy = [&](int c) { return std::pair<int, int>{c % ncx, c / ncx}; };
    auto [ax, ay] = cxy(cl.cells.front());
    for (int c : cl.cells) {
      auto [bx, by] = cxy(c);
      int ux = bx, uy = by;
      if (d.periodic_x && std::abs(ux - ax) > ncx / 2) ux += (ux < ax ? ncx : -ncx);
      if (d.periodic_y && std::abs(uy - ay) > ncy / 2) uy += (uy < ay ? ncy : -ncy);
      lx = std::min(lx, ux);
      ly = std::min(ly, uy);
      hx = std::max(hx, ux);
      hy = std::max(hy, uy);
    }
    for (int dil : {2, 3, 1}) {
      int nlx = lx - dil, nly = ly - dil, nhx = hx + 1 + dil, nhy = hy + 1 + dil;
      if (!d.periodic_x && (nlx < 0 || nhx > d.nx - 1)) continue;
      if (!d.periodic_y && (nly < 0 || nhy > d.ny - 1)) continue;
      if (d.periodic_x && nhx - nlx >= d.nx) continue;
      if (d.periodic_y && nhy - nly >= d.ny) continue;
      std::vector<Vec2> loop;
      for (int ix = nlx; ix < nhx; ++ix) loop.push_back(d.node(ix, nly));
      for (int iy = nly; iy < nhy; ++iy) loop.push_back(d.node(nhx, iy));
      for (int ix = nhx; ix > nlx; --ix) loop.push_back(d.node(ix, nhy));
      for (int iy = nhy; iy > nly; --iy) loop.push_back(d.node(nlx, iy));
      try {
        cl.winding = poincare_index(f, loop, speed_tol);
        cl.winding_valid = true;
        break;
      } catch (const Error&) {
        continue;
      }
    }
  }

  std::sort(clusters.begin(), clusters.end(), [](const SingularCluster& a, const SingularCluster& b) {
    if (a.centroid.x != b.centroid.x) return a.centroid.x < b.centroid.x;
    return a.centroid.y < b.centroid.y;
  });
  for (size_t i = 0; i < clusters.size(); ++i) clusters[i].id = static_cast<int>(i);
  return clusters;
}

// ---------------------------------------------------------------------------
// Sector analysis on a probe circle

double default_probe_radius(const GridDomain& d, const SingularCluster& c) {
  return 1.5 * d.max_spacing() * (1 + c.diameter_cells);
}

namespace {

struct CircleProbe {
  const VectorGrid& f;
  Vec2 ctr;
  double R;
  double speed_tol;
  double step;
  double stop_radius;
  long max_steps;

  Vec2 point(double theta) const {
    return f.domain.wrap(ctr + Vec2{R * std::cos(theta), R * std::sin(theta)});
  }
  double radial(double theta) const {
    Vec2 n{std::cos(theta), std::sin(theta)};
    return f.sample(point(theta)).dot(n);
  }
  double dist(const Vec2& p) const { return min_image(f.domain, ctr, p).norm(); }
  double angle_of(const Vec2& p) const {
    Vec2 o = min_image(f.domain, ctr, p);
    return std::atan2(o.y, o.x);
  }
};

// Does the orbit through the circle point at angle 0 wind once around the
// cluster and close up? Detects centers regardless of orbit eccentricity.
bool orbit_circulates(const CircleProbe& cp) {
  UnitStepper st(cp.f, cp.step, cp.speed_tol);
  Vec2 p = cp.point(0.0);
  Vec2 start = p;
  double prev_ang = cp.angle_of(p);
  double turned = 0;
  double travelled = 0;
  const double cap = 80 * cp.R;
  while (travelled < cap) {
    if (!st.step(p, +1)) return false;
    travelled += cp.step;
    if (!cp.f.domain.inside(p)) return false;
    double dist = cp.dist(p);
    if (dist < cp.stop_radius || dist > 6 * cp.R) return false;
    double ang = cp.angle_of(p);
    turned += wrap_angle(ang - prev_ang);
    prev_ang = ang;
    if (travelled > 6 * cp.step && min_image(cp.f.domain, start, p).norm() < 0.75 * cp.step)
      return std::abs(turned) > 1.7 * kPi;
  }
  return false;
}

// 'E' when the grazing orbit stays inside the circle, 'H' when outside,
// 0 when unresolved.
char classify_tangency(const CircleProbe& cp, double theta) {
  double delta = std::max(0.75 * cp.f.domain.min_spacing(), 0.02 * cp.R);
  int verdict[2] = {0, 0};
  for (int k = 0; k < 2; ++k) {
    int dir = k == 0 ? +1 : -1;
    UnitStepper st(cp.f, cp.step, cp.speed_tol);
    Vec2 p = cp.point(theta);
    double extremal = 0;
    double travelled = 0;
    while (travelled < 4 * cp.R) {
      if (!st.step(p, dir)) break;
      travelled += cp.step;
      if (!cp.f.domain.inside(p)) break;
      double dd = cp.dist(p) - cp.R;
      if (std::abs(dd) > std::abs(extremal)) extremal = dd;
      if (std::abs(dd) > delta) break;
      if (cp.dist(p) < cp.stop_radius) break;
    }
    if (std::abs(extremal) > 0.25 * delta) verdict[k] = extremal > 0 ? 1 : -1;
  }
  if (verdict[0] > 0 && verdict[1] > 0) return 'H';
  if (verdict[0] < 0 && verdict[1] < 0) return 'E';
  return 0;
}

enum class ProbeOutcome { HitCluster, Exited, Capped };

struct InwardProbe {
  ProbeOutcome outcome;
  double exit_angle = 0;
};

// Follows the orbit from the circle point inward (against the crossing
// direction) until it re-emerges or reaches the cluster.
InwardProbe probe_inward(const CircleProbe& cp, double theta, int dir) {
  UnitStepper st(cp.f, cp.step, cp.speed_tol);
  Vec2 p = cp.point(theta);
  double travelled = 0;
  const double out_band = cp.R + 0.75 * cp.f.domain.min_spacing();
  const double cap = 40 * cp.R;
  long steps = 0;
  while (travelled < cap && steps < cp.max_steps) {
    if (!st.step(p, dir)) return {ProbeOutcome::HitCluster, 0};
    ++steps;
    travelled += cp.step;
    if (!cp.f.domain.inside(p)) return {ProbeOutcome::Capped, 0};
    double dist = cp.dist(p);
    if (dist < cp.stop_radius) return {ProbeOutcome::HitCluster, 0};
    if (dist > out_band) return {ProbeOutcome::Exited, cp.angle_of(p)};
  }
  return {ProbeOutcome::Capped, 0};
}

}  // namespace

SectorAnalysis analyze_sectors(const VectorGrid& f, const std::vector<SingularCluster>& clusters,
                               int cluster_id, double radius, const ProbeParams& pp) {
  const SingularCluster& cl = clusters[cluster_id];
  const GridDomain& d = f.domain;

  CircleProbe cp{f,
                 cl.centroid,
                 radius,
                 pp.speed_tol,
                 0.25 * d.min_spacing(),
                 cl.stop_radius(d),
                 pp.max_probe_steps};

  for (const auto& other : clusters) {
    if (other.id == cluster_id) continue;
    double sep = min_image(d, cl.centroid, other.centroid).norm();
    if (sep < radius + other.radius)
      throw Error(Errc::Ambiguous, "probe circle around cluster " + std::to_string(cluster_id) +
                                       " would contain cluster " + std::to_string(other.id));
  }

  SectorAnalysis out;
  out.probe_radius = radius;

  const int N = pp.samples;
  std::vector<double> rr(N), ss(N);
  double max_speed_on_circle = 0;
  for (int i = 0; i < N; ++i) {
    double th = kTwoPi * i / N;
    Vec2 p = cp.point(th);
    if (!d.inside(p))
      throw Error(Errc::Ambiguous, "probe circle leaves the domain; enlarge the grid margin");
    Vec2 w = f.sample(p);
    ss[i] = w.norm();
    if (ss[i] < pp.speed_tol)
      throw Error(Errc::Ambiguous, "probe circle touches a slow zone; adjust the radius");
    max_speed_on_circle = std::max(max_speed_on_circle, ss[i]);
    Vec2 n{std::cos(th), std::sin(th)};
    rr[i] = w.dot(n);
  }

  if (orbit_circulates(cp)) {
    out.circulating = true;
    return out;  // empty word: center candidate
  }

  const double ztol = 1e-9 * max_speed_on_circle;
  auto sgn = [&](double r) { return std::abs(r) <= ztol ? 0 : (r > 0 ? 1 : -1); };

  bool has_pos = false, has_neg = false;
  for (int i = 0; i < N; ++i) {
    if (sgn(rr[i]) > 0) has_pos = true;
    if (sgn(rr[i]) < 0) has_neg = true;
  }
  if (!has_pos && !has_neg)
    throw Error(Errc::Ambiguous, "radial component vanishes on the whole circle yet no closed orbit found");
  if (!(has_pos && has_neg)) {
    out.word.letters = "P";  // one-way crossing everywhere: node- or focus-like bundle
    return out;
  }

  // Sign transitions, bisection-refined.
  std::vector<TangencyEvent> events;
  int prev_idx = -1;
  int prev_sign = 0;
  for (int i = N - 1; i >= 0; --i) {
    if (sgn(rr[i]) != 0) {
      prev_idx = i;
      prev_sign = sgn(rr[i]);
      break;
    }
  }
  if (prev_idx < 0) throw Error(Errc::Ambiguous, "no resolvable radial signs on the probe circle");
  int first_nonzero = -1;
  for (int i = 0; i < N; ++i) {
    int s = sgn(rr[i]);
    if (s == 0) continue;
    if (first_nonzero < 0) first_nonzero = i;
    if (s != prev_sign) {
      double lo = kTwoPi * prev_idx / N;
      double hi = kTwoPi * i / N;
      if (hi < lo) hi += kTwoPi;
      double rlo = cp.radial(lo);
      for (int it = 0; it < 60 && hi - lo > 1e-12; ++it) {
        double mid = 0.5 * (lo + hi);
        double rm = cp.radial(mid);
        if ((rm > 0) == (rlo > 0)) {
          lo = mid;
          rlo = rm;
        } else {
          hi = mid;
        }
      }
      events.push_back({wrap_positive(0.5 * (lo + hi)), 0});
    }
    prev_idx = i;
    prev_sign = s;
  }

  for (auto& ev : events) {
    ev.letter = classify_tangency(cp, ev.angle);
    if (ev.letter == 0) {
      // one retry at slight angular offsets before giving up
      for (double off : {2e-3, -2e-3, 5e-3, -5e-3}) {
        ev.letter = classify_tangency(cp, ev.angle + off);
        if (ev.letter != 0) break;
      }
      if (ev.letter == 0)
        throw Error(Errc::Ambiguous, "tangency classification unresolved; enlarge radius or resolution");
    }
  }
  std::sort(events.begin(), events.end(),
            [](const TangencyEvent& a, const TangencyEvent& b) { return a.angle < b.angle; });
  out.tangencies = events;

  // Arc scan: parabolic bundles and separatrix directions.
  struct Letter {
    double angle;
    char c;
  };
  std::vector<Letter> letters;
  for (const auto& ev : events) letters.push_back({ev.angle, ev.letter});

  const int M = static_cast<int>(events.size());
  for (int i = 0; i < M; ++i) {
    double a = events[i].angle;
    double b = events[(i + 1) % M].angle;
    if (b <= a) b += kTwoPi;
    double margin = 0.04 * (b - a);
    // crossing sign on this arc
    double rmid = cp.radial(0.5 * (a + b));
    int dir_in = rmid > 0 ? -1 : +1;  // direction that enters the disk

    const int kProbes = 7;
    int p_hits = 0;
    std::vector<std::pair<double, InwardProbe>> probes;
    for (int k = 0; k < kProbes; ++k) {
      double th = a + margin + (b - a - 2 * margin) * (k + 0.5) / kProbes;
      InwardProbe ip = probe_inward(cp, th, dir_in);
      probes.emplace_back(th, ip);
      if (ip.outcome == ProbeOutcome::HitCluster) ++p_hits;
    }
    if (2 * p_hits >= kProbes) {
      letters.push_back({wrap_positive(0.5 * (a + b)), 'P'});
      continue;
    }

    // Behavior switch hunt: the separatrix direction inside this arc.
    auto behavior = [&](double th) -> int {
      InwardProbe ip = probe_inward(cp, th, dir_in);
      if (ip.outcome != ProbeOutcome::Exited) return 0;
      double off = wrap_angle(ip.exit_angle - th);
      return off > 0 ? 1 : -1;
    };
    double lo = a + margin, hi = b - margin;
    int blo = behavior(lo), bhi = behavior(hi);
    double found = std::numeric_limits<double>::quiet_NaN();
    if (blo == 0) {
      found = lo;
    } else if (bhi == 0) {
      found = hi;
    } else if (blo != bhi) {
      for (int it = 0; it < 60 && hi - lo > 1e-11; ++it) {
        double mid = 0.5 * (lo + hi);
        int bm = behavior(mid);
        if (bm == 0) {
          lo = hi = mid;
          break;
        }
        if (bm == blo)
          lo = mid;
        else
          hi = mid;
      }
      found = 0.5 * (lo + hi);
    }
    if (std::isfinite(found)) {
      char side = events[i].letter == 'H' || events[(i + 1) % M].letter == 'H' ? 'H' : 'E';
      out.rays.push_back({wrap_positive(found), rmid > 0, side});
    }
  }

  std::sort(letters.begin(), letters.end(),
            [](const Letter& x, const Letter& y) { return x.angle < y.angle; });
  for (const auto& l : letters) out.word.letters.push_back(l.c);
  std::sort(out.rays.begin(), out.rays.end(),
            [](const SectorAnalysis::SeparatrixRay& x, const SectorAnalysis::SeparatrixRay& y) {
              return x.angle < y.angle;
            });
  return out;
}

SectorWord sector_word(const VectorGrid& f, const std::vector<SingularCluster>& clusters,
                       int cluster_id, double radius, const ProbeParams& pp) {
  try {
    return analyze_sectors(f, clusters, cluster_id, radius, pp).word;
  } catch (const Error& e) {
    if (e.code() != Errc::Ambiguous) throw;
    ProbeParams fine = pp;
    fine.samples = 8192;
    return analyze_sectors(f, clusters, cluster_id, radius, fine).word;
  }
}

SingularPoint classify_singularity(const SectorWord& word, int winding_index,
                                   const SingularCluster& cluster) {
  SingularPoint sp;
  sp.position = cluster.centroid;
  sp.ref = cluster.id;

  if (cluster.degenerate()) {
    sp.kind = SingKind::Degenerate;
    sp.index = cluster.winding_valid ? cluster.winding : 0;
    return sp;
  }

  if (word.empty()) {
    if (winding_index != 1)
      throw Error(Errc::Inconsistent, "closed circulating orbits around a point of index " +
                                          std::to_string(winding_index));
    sp.kind = SingKind::Center;
    sp.index = 1;
    sp.word = word;
    return sp;
  }

  int e = word.count('E'), h = word.count('H');
  if ((e - h) % 2 != 0)
    throw Error(Errc::Inconsistent, "sector word parity violated: " + word.normalized());
  int widx = word.index();
  if (widx != winding_index)
    throw Error(Errc::Inconsistent, "sector word gives index " + std::to_string(widx) +
                                        " but winding gives " + std::to_string(winding_index) +
                                        "; resolution too coarse");
  sp.word = word;
  sp.index = widx;
  int len = static_cast<int>(word.letters.size());
  bool all_h = h == len;
  sp.kind = (all_h && len >= 4 && len % 2 == 0) ? SingKind::MultiSaddle : SingKind::Sectored;
  return sp;
}

}  // namespace hamflow
