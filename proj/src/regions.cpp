#include "hamflow/regions.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "probe_util.hpp"

namespace hamflow {

using detail::min_image;

const char* region_class_name(RegionClass c) {
  switch (c) {
    case RegionClass::TrivialFlowBox: return "trivial_flow_box";
    case RegionClass::PeriodicAnnulus: return "periodic_annulus";
    case RegionClass::TransverseAnnulus: return "transverse_annulus";
    case RegionClass::PeriodicTorus: return "periodic_torus";
    case RegionClass::Unclassified: return "unclassified";
  }
  return "unknown";
}

std::string SkeletonObjRef::str() const {
  const char* k = "";
  switch (kind) {
    case Kind::Separatrix: k = "sep"; break;
    case Kind::Cycle: k = "cycle"; break;
    case Kind::SingularPoint: k = "sing"; break;
    case Kind::End: k = "end"; break;
    case Kind::BoundaryOrbit: k = "boundary"; break;
  }
  return std::string(k) + ":" + std::to_string(id);
}

namespace {

struct CellGrid {
  const GridDomain* d;
  int ncx, ncy;

  int wrap_cell(int cx, int cy) const {
    if (d->periodic_x) cx = (cx % ncx + ncx) % ncx;
    if (d->periodic_y) cy = (cy % ncy + ncy) % ncy;
    if (cx < 0 || cx >= ncx || cy < 0 || cy >= ncy) return -1;
    return cy * ncx + cx;
  }
};

void mark_curve(const GridDomain& d, const std::vector<Vec2>& pts, int curve_idx,
                std::vector<std::vector<int>>& cell_curves) {
  if (pts.empty()) return;
  CellGrid cg{&d, d.cell_count_x(), d.cell_count_y()};
  auto mark = [&](int cell) {
    if (cell < 0) return;
    auto& v = cell_curves[cell];
    if (v.empty() || v.back() != curve_idx) {
      if (std::find(v.begin(), v.end(), curve_idx) == v.end()) v.push_back(curve_idx);
    }
  };
  int prev_cx = -1, prev_cy = -1;
  for (const auto& p : pts) {
    Vec2 q = d.wrap(p);
    int cx = std::clamp(static_cast<int>(std::floor((q.x - d.x0) / d.dx)), 0, cg.ncx - 1);
    int cy = std::clamp(static_cast<int>(std::floor((q.y - d.y0) / d.dy)), 0, cg.ncy - 1);
    mark(cg.wrap_cell(cx, cy));
    if (prev_cx >= 0 && cx != prev_cx && cy != prev_cy) {
      int sx = std::abs(cx - prev_cx), sy = std::abs(cy - prev_cy);
      bool adjacent = (d.periodic_x ? std::min(sx, cg.ncx - sx) : sx) <= 1 &&
                      (d.periodic_y ? std::min(sy, cg.ncy - sy) : sy) <= 1;
      if (adjacent) {  // plug the diagonal hop
        mark(cg.wrap_cell(prev_cx, cy));
        mark(cg.wrap_cell(cx, prev_cy));
      }
    }
    prev_cx = cx;
    prev_cy = cy;
  }
}

}  // namespace

RegionDecomposition decompose_regions(const VectorGrid& f,
                                      const std::vector<SingularCluster>& clusters,
                                      const std::vector<Separatrix>& separatrices,
                                      const std::vector<ClosedOrbit>& skeleton_cycles,
                                      const StopMask& stop,
                                      const std::vector<EndDescriptor>& ends,
                                      const IntegrationParams& ip) {
  const GridDomain& d = f.domain;
  const int ncx = d.cell_count_x(), ncy = d.cell_count_y();
  const int ncells = ncx * ncy;
  CellGrid cg{&d, ncx, ncy};

  RegionDecomposition deco;
  deco.cell_curves.assign(ncells, {});

  for (const auto& s : separatrices) {
    deco.curve_refs.push_back({SkeletonObjRef::Kind::Separatrix, s.id});
    deco.curve_points.push_back(s.orbit.points);
  }
  for (size_t i = 0; i < skeleton_cycles.size(); ++i) {
    deco.curve_refs.push_back({SkeletonObjRef::Kind::Cycle, static_cast<int>(i)});
    deco.curve_points.push_back(skeleton_cycles[i].representative.points);
  }
  // Invariant boundary edges are skeleton orbits too.
  auto add_boundary_orbit = [&](int edge) {
    std::vector<Vec2> pts;
    if (edge == 0 || edge == 1) {
      double x = edge == 0 ? d.x0 : d.xmax();
      for (int iy = 0; iy < d.ny; ++iy) pts.push_back({x, d.y0 + iy * d.dy});
    } else {
      double y = edge == 2 ? d.y0 : d.ymax();
      for (int ix = 0; ix < d.nx; ++ix) pts.push_back({d.x0 + ix * d.dx, y});
    }
    deco.curve_refs.push_back({SkeletonObjRef::Kind::BoundaryOrbit, edge});
    deco.curve_points.push_back(std::move(pts));
  };
  if (d.left == BoundaryPolicy::Invariant) add_boundary_orbit(0);
  if (d.right == BoundaryPolicy::Invariant) add_boundary_orbit(1);
  if (d.bottom == BoundaryPolicy::Invariant) add_boundary_orbit(2);
  if (d.top == BoundaryPolicy::Invariant) add_boundary_orbit(3);

  for (size_t i = 0; i < deco.curve_points.size(); ++i)
    mark_curve(d, deco.curve_points[i], static_cast<int>(i), deco.cell_curves);

  std::vector<char> blocked(ncells, 0);
  for (int c = 0; c < ncells; ++c)
    if (!deco.cell_curves[c].empty() || (!stop.empty() && stop.at_cell(c) >= 0)) blocked[c] = 1;

  // Flood fill the complement, row-major discovery order.
  deco.region_of_cell.assign(ncells, -1);
  int nregions = 0;
  for (int c0 = 0; c0 < ncells; ++c0) {
    if (blocked[c0] || deco.region_of_cell[c0] >= 0) continue;
    int rid = nregions++;
    deco.regions.emplace_back();
    Region& reg = deco.regions.back();
    reg.id = rid;
    std::deque<int> queue{c0};
    deco.region_of_cell[c0] = rid;
    while (!queue.empty()) {
      int c = queue.front();
      queue.pop_front();
      reg.cells.push_back(c);
      int cx = c % ncx, cy = c / ncx;
      const int off[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
      for (auto& o : off) {
        int n = cg.wrap_cell(cx + o[0], cy + o[1]);
        if (n < 0 || blocked[n] || deco.region_of_cell[n] >= 0) continue;
        deco.region_of_cell[n] = rid;
        queue.push_back(n);
      }
    }
    std::sort(reg.cells.begin(), reg.cells.end());
  }

  // Depth transform: distance to blocked cells or to a non-periodic border.
  std::vector<int> depth(ncells, -1);
  std::deque<int> bfs;
  for (int c = 0; c < ncells; ++c) {
    if (blocked[c]) continue;
    int cx = c % ncx, cy = c / ncx;
    bool border = (!d.periodic_x && (cx == 0 || cx == ncx - 1)) ||
                  (!d.periodic_y && (cy == 0 || cy == ncy - 1));
    bool next_to_block = false;
    const int off[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    for (auto& o : off) {
      int n = cg.wrap_cell(cx + o[0], cy + o[1]);
      if (n >= 0 && blocked[n]) next_to_block = true;
    }
    if (border || next_to_block) {
      depth[c] = 0;
      bfs.push_back(c);
    }
  }
  while (!bfs.empty()) {
    int c = bfs.front();
    bfs.pop_front();
    int cx = c % ncx, cy = c / ncx;
    const int off[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    for (auto& o : off) {
      int n = cg.wrap_cell(cx + o[0], cy + o[1]);
      if (n < 0 || blocked[n] || depth[n] >= 0) continue;
      depth[n] = depth[c] + 1;
      bfs.push_back(n);
    }
  }

  // Classify each region from its deepest cell.
  for (auto& reg : deco.regions) {
    int best = reg.cells.front(), best_depth = -1;
    for (int c : reg.cells)
      if (depth[c] > best_depth) {
        best_depth = depth[c];
        best = c;
      }
    reg.rep_seed = d.cell_center(best);

    try {
      reg.rep_forward = integrate_orbit(f, stop, ends, reg.rep_seed, Direction::Forward, ip);
    } catch (const Error& e) {
      reg.issue = e.what();
      continue;
    }

    if (reg.rep_forward.termination == Termination::Closed) {
      bool whole_compact = d.compact() && deco.curve_refs.empty() && clusters.empty();
      reg.cls = whole_compact ? RegionClass::PeriodicTorus : RegionClass::PeriodicAnnulus;
    } else {
      try {
        reg.rep_backward = integrate_orbit(f, stop, ends, reg.rep_seed, Direction::Backward, ip);
      } catch (const Error& e) {
        reg.issue = e.what();
        continue;
      }
      if (reg.rep_forward.termination == Termination::StepCap ||
          reg.rep_backward.termination == Termination::StepCap) {
        reg.issue = "representative orbit hit the step cap";
        continue;
      }
      // Cutting a flow box along a full orbit disconnects it; an annulus
      // crossed by its orbits stays connected.
      std::vector<std::vector<int>> orbit_cells(ncells);
      std::vector<Vec2> both = reg.rep_backward.points;
      std::reverse(both.begin(), both.end());
      both.insert(both.end(), reg.rep_forward.points.begin(), reg.rep_forward.points.end());
      mark_curve(d, both, 0, orbit_cells);
      std::vector<char> cut(ncells, 0);
      int remaining = 0, first_free = -1;
      for (int c : reg.cells) {
        if (!orbit_cells[c].empty())
          cut[c] = 1;
        else {
          ++remaining;
          if (first_free < 0) first_free = c;
        }
      }
      int reached = 0;
      if (first_free >= 0) {
        std::deque<int> q2{first_free};
        std::vector<char> seen(ncells, 0);
        seen[first_free] = 1;
        while (!q2.empty()) {
          int c = q2.front();
          q2.pop_front();
          ++reached;
          int cx = c % ncx, cy = c / ncx;
          const int off[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
          for (auto& o : off) {
            int n = cg.wrap_cell(cx + o[0], cy + o[1]);
            if (n < 0 || seen[n] || cut[n]) continue;
            if (deco.region_of_cell[n] != reg.id) continue;
            seen[n] = 1;
            q2.push_back(n);
          }
        }
      }
      reg.cls = (remaining > 8 && reached == remaining) ? RegionClass::TransverseAnnulus
                                                        : RegionClass::TrivialFlowBox;
    }
  }

  // Which ends does each region touch?
  for (auto& reg : deco.regions) {
    std::vector<char> touch(8, 0);
    for (int c : reg.cells) {
      int cx = c % ncx, cy = c / ncx;
      if (!d.periodic_x && cx == 0) touch[0] = 1;
      if (!d.periodic_x && cx == ncx - 1) touch[1] = 1;
      if (!d.periodic_y && cy == 0) touch[2] = 1;
      if (!d.periodic_y && cy == ncy - 1) touch[3] = 1;
    }
    for (const auto& e : ends)
      for (int edge : e.edges)
        if (touch[edge] &&
            std::find(reg.adjacent_ends.begin(), reg.adjacent_ends.end(), e.id) ==
                reg.adjacent_ends.end())
          reg.adjacent_ends.push_back(e.id);
  }

  return deco;
}

// ---------------------------------------------------------------------------
// Side attribution

namespace {

int edge_of_exit_point(const GridDomain& d, const Vec2& p) {
  double eps = 1e-9 * d.min_spacing();
  if (!d.periodic_x && p.x <= d.x0 + eps) return 0;
  if (!d.periodic_x && p.x >= d.xmax() - eps) return 1;
  if (!d.periodic_y && p.y <= d.y0 + eps) return 2;
  if (!d.periodic_y && p.y >= d.ymax() - eps) return 3;
  return -1;
}

}  // namespace

void side_boundaries(const VectorGrid& f, RegionDecomposition& deco, Region& region,
                     const StopMask& stop, const std::vector<EndDescriptor>& ends,
                     const IntegrationParams& ip) {
  const GridDomain& d = f.domain;
  const double walk_step = 0.5 * d.min_spacing();
  const long cap = static_cast<long>(3 * (d.width() + d.height()) / walk_step) + 16;

  auto end_of_edge = [&](int edge) {
    for (const auto& e : ends)
      for (int g : e.edges)
        if (g == edge) return e.id;
    return -1;
  };

  const std::vector<Vec2>& fw = region.rep_forward.points;
  std::vector<Vec2> stations;
  {
    std::vector<Vec2> path = region.rep_backward.points;
    std::reverse(path.begin(), path.end());
    path.insert(path.end(), fw.begin(), fw.end());
    size_t count = std::min<size_t>(48, path.size());
    if (count == 0) return;
    double stride = static_cast<double>(path.size() - 1) / std::max<size_t>(1, count - 1);
    for (size_t i = 0; i < count; ++i)
      stations.push_back(path[static_cast<size_t>(std::lround(i * stride))]);
  }

  auto attribute = [&](const Vec2& probe, std::vector<SkeletonObjRef>& side,
                       std::map<SkeletonObjRef, std::vector<Vec2>>& hits,
                       int exit_edge_id) -> bool {
    SkeletonObjRef ref;
    Vec2 hit_point = probe;
    if (exit_edge_id >= 0) {
      int eid = end_of_edge(exit_edge_id);
      if (eid >= 0)
        ref = {SkeletonObjRef::Kind::End, eid};
      else
        ref = {SkeletonObjRef::Kind::BoundaryOrbit, exit_edge_id};
    } else {
      int cell = d.cell_of(probe);
      const auto& curves = deco.cell_curves[cell];
      int owner = stop.empty() ? -1 : stop.at_cell(cell);
      if (!curves.empty()) {
        int best_curve = curves.front();
        double best_dist = std::numeric_limits<double>::max();
        for (int ci : curves) {
          for (const auto& q : deco.curve_points[ci]) {
            double dist = min_image(d, probe, q).norm();
            if (dist < best_dist) {
              best_dist = dist;
              best_curve = ci;
            }
            if (best_dist < 0.25 * d.min_spacing()) break;
          }
        }
        ref = deco.curve_refs[best_curve];
      } else if (owner >= 0) {
        ref = {SkeletonObjRef::Kind::SingularPoint, owner};
      } else {
        return false;
      }
    }
    if (std::find(side.begin(), side.end(), ref) == side.end()) side.push_back(ref);
    auto& v = hits[ref];
    if (v.size() < 64) v.push_back(hit_point);
    return true;
  };

  bool got_r = false, got_l = false;
  for (const auto& p0 : stations) {
    Vec2 w0 = f.sample(d.wrap(p0));
    if (w0.norm() < ip.speed_tol) continue;
    for (int side_sign : {+1, -1}) {  // +1: left of the flow (uphill), -1: right
      auto& side = side_sign > 0 ? region.side_l : region.side_r;
      auto& hits = side_sign > 0 ? region.hits_l : region.hits_r;
      Vec2 q = d.wrap(p0);
      bool done = false;
      for (long k = 0; k < cap && !done; ++k) {
        Vec2 w = f.sample(q);
        if (w.norm() < ip.speed_tol) {
          int cell = d.cell_of(q);
          int owner = stop.empty() ? -1 : stop.at_cell(cell);
          if (owner >= 0)
            done = attribute(q, side, hits, -1);
          break;
        }
        Vec2 n = w.perp_ccw().normalized() * side_sign;
        Vec2 qn = q + n * walk_step;
        Vec2 mid = q + n * (0.5 * walk_step);
        for (const Vec2& probe : {mid, qn}) {
          if (!d.inside(probe)) {
            Vec2 clipped = probe;
            int edge = exit_edge(d, q, clipped);
            // fall back to coordinate test when the crossing is ambiguous
            if (edge < 0) edge = edge_of_exit_point(d, clipped);
            done = attribute(clipped, side, hits, edge);
            break;
          }
          int cell = d.cell_of(probe);
          bool on_curve = !deco.cell_curves[cell].empty();
          bool on_stop = !stop.empty() && stop.at_cell(cell) >= 0;
          if (on_curve || on_stop) {
            done = attribute(probe, side, hits, -1);
            break;
          }
        }
        q = d.wrap(qn);
      }
      if (done) {
        if (side_sign > 0 && !got_l) {
          region.witness_l = q;
          got_l = true;
        }
        if (side_sign < 0 && !got_r) {
          region.witness_r = q;
          got_r = true;
        }
      }
    }
  }
  region.witness_valid = got_r && got_l;
  std::sort(region.side_r.begin(), region.side_r.end());
  std::sort(region.side_l.begin(), region.side_l.end());
  if (region.side_r.empty() || region.side_l.empty()) {
    if (region.issue.empty()) region.issue = "SideAmbiguous: a side of the region has no attribution";
  }
}

}  // namespace hamflow
