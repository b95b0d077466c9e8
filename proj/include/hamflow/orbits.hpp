#pragma once

#include <optional>
#include <vector>

#include "hamflow/grid.hpp"
#include "hamflow/singular.hpp"

namespace hamflow {

enum class Termination { HitSingular, HitEnd, Closed, StepCap };

const char* termination_name(Termination t);

struct EndpointRef {
  enum class Kind { None, Singular, End };
  Kind kind = Kind::None;
  int id = -1;

  bool operator==(const EndpointRef& o) const { return kind == o.kind && id == o.id; }
  bool is_end() const { return kind == Kind::End; }
};

struct Orbit {
  std::vector<Vec2> points;
  Termination termination = Termination::StepCap;
  int hit_cluster = -1;  // HitSingular
  int hit_end = -1;      // HitEnd
  double length = 0;

  EndpointRef endpoint() const {
    if (termination == Termination::HitSingular) return {EndpointRef::Kind::Singular, hit_cluster};
    if (termination == Termination::HitEnd) return {EndpointRef::Kind::End, hit_end};
    return {};
  }
};

struct IntegrationParams {
  double speed_tol = 0;
  double step = 0;         // 0.25 * min spacing
  double closure_tol = 0;  // 0.5 * min spacing
  long max_steps = 1000000;
};

IntegrationParams default_integration(const VectorGrid& f, double speed_tol);

// One end per maximal run of `end` edges around the domain boundary.
// Edge ids: 0 left, 1 right, 2 bottom, 3 top.
struct EndDescriptor {
  int id = -1;
  std::vector<int> edges;
};

std::vector<EndDescriptor> enumerate_ends(const GridDomain& d);

// Cells whose orbits are considered to have reached a singular cluster:
// the cluster cells dilated by one cell.
struct StopMask {
  int ncx = 0, ncy = 0;
  std::vector<int> owner;  // -1 free, else cluster id

  int at_cell(int cell) const { return owner[cell]; }
  bool empty() const { return owner.empty(); }
};

StopMask build_stop_mask(const GridDomain& d, const std::vector<SingularCluster>& clusters);

enum class Direction { Forward, Backward };

// Which end edge does the segment a->b leave the domain through? Returns the
// edge id (0 left, 1 right, 2 bottom, 3 top) or -1, and clips b onto it.
int exit_edge(const GridDomain& d, const Vec2& a, Vec2& b);

// Arclength-parametrized RK4 streamline from the seed. Terminates on the
// stop mask, on leaving through an `end` edge, on closing up near the seed,
// or at the step cap. Points follow the traversal order.
Orbit integrate_orbit(const VectorGrid& f, const StopMask& stop,
                      const std::vector<EndDescriptor>& ends, Vec2 seed, Direction dir,
                      const IntegrationParams& ip);

enum class BorderClass { HyperbolicBorder, EllipticBorder, ParabolicBorder, VirtuallyBorder };

const char* border_class_name(BorderClass b);

struct Separatrix {
  int id = -1;
  Orbit orbit;         // oriented along the flow
  EndpointRef source;  // alpha limit
  EndpointRef target;  // omega limit
  BorderClass border_class = BorderClass::HyperbolicBorder;
  char sector_side = 'H';
};

// Follows each refined separatrix direction out of its probe circle and back
// into the cluster, then deduplicates orbits traced from both ends.
std::vector<Separatrix> trace_separatrices(const VectorGrid& f,
                                           const std::vector<SingularCluster>& clusters,
                                           const std::vector<SectorAnalysis>& sectors,
                                           const StopMask& stop,
                                           const std::vector<EndDescriptor>& ends,
                                           const IntegrationParams& ip);

struct ClosedOrbit {
  Orbit representative;
  bool is_limit_cycle = false;
  bool one_sided = false;
};

// Returns the closed orbit through the seed, if the forward orbit closes up.
// Limit-cycle status comes from normal-offset probes on both sides.
std::optional<ClosedOrbit> detect_closed_orbit(const VectorGrid& f, const StopMask& stop,
                                               const std::vector<EndDescriptor>& ends, Vec2 seed,
                                               const IntegrationParams& ip);

}  // namespace hamflow
