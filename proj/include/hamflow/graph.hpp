#pragma once

#include <string>
#include <vector>

#include "hamflow/regions.hpp"

namespace hamflow {

// BD+ of the flow: singular points, limit cycles, one-sided periodic orbits,
// and (virtually) border separatrices, plus the ends once classified.
struct Skeleton {
  std::vector<SingularPoint> singular_points;
  std::vector<Separatrix> separatrices;
  std::vector<ClosedOrbit> limit_cycles;
  std::vector<ClosedOrbit> one_sided_periodic;
  std::vector<SingularPoint> ends;
};

// Keeps limit cycles and one-sided periodic orbits, drops plain periodic
// orbits; separatrices and singular points pass through.
Skeleton build_bd_plus(const std::vector<SingularPoint>& points,
                       const std::vector<Separatrix>& separatrices,
                       const std::vector<ClosedOrbit>& closed_orbits,
                       const std::vector<SingularPoint>& ends);

struct EndClassifyOptions {
  double speed_tol = 0;
  int samples = 1024;
  long max_probe_steps = 200000;
};

// Sector words of the ends, built on a probe loop inset from the boundary.
// A boundary cycle shielded by closed orbits gives a center-like end.
std::vector<SingularPoint> classify_ends(const VectorGrid& f,
                                         const std::vector<SingularCluster>& clusters,
                                         const RegionDecomposition& deco, const StopMask& stop,
                                         const std::vector<EndDescriptor>& ends,
                                         const EndClassifyOptions& opts);

enum class VertexLabel {
  Center,
  MultiSaddleConnection,
  BorderSeparatrixUnion,
  EndSector,
  LimitCycle,
  OneSidedCycle
};

const char* vertex_label_name(VertexLabel l);

struct GraphVertex {
  int id = -1;
  VertexLabel label = VertexLabel::Center;
  std::vector<std::string> words;    // normalized words of member points/ends
  std::vector<std::string> members;  // "sing:i", "sep:i", "cycle:i", "end:i"
  Vec2 anchor;
};

struct GraphEdge {
  int id = -1;
  int src = -1, dst = -1;
  RegionClass label = RegionClass::TrivialFlowBox;
  int region = -1;
  Vec2 witness_lo, witness_hi;  // points next to the low-H and high-H sides
  bool witness_valid = false;
};

struct Anomaly {
  enum class Kind { TransverseAnnulus, PeriodicTorus, DegenerateCluster, Unclassified };
  Kind kind;
  int ref = -1;
  std::string note;
};

const char* anomaly_kind_name(Anomaly::Kind k);

// One rotation entry: an edge endpoint at this vertex.
struct EdgeEndpoint {
  int edge = -1;
  bool head = false;  // false: tail (src side), true: head (dst side)
  bool operator==(const EdgeEndpoint& o) const { return edge == o.edge && head == o.head; }
};

struct ExtendedOrbitGraph {
  std::vector<GraphVertex> vertices;
  std::vector<GraphEdge> edges;
  std::vector<std::vector<EdgeEndpoint>> rotation;  // per vertex, cyclic
  std::vector<Anomaly> anomalies;
};

// Union of the sigma-side relation, separatrix endpoint closure, and shared
// singular points; centers stay singletons. Returns a vertex id per skeleton
// element, keyed like SkeletonObjRef.
struct VertexPartition {
  std::vector<int> of_sep, of_cycle, of_sing, of_end;
  int count = 0;
};

VertexPartition extended_orbit_vertices(const Skeleton& sk, const RegionDecomposition& deco);

// One directed edge per flow box or periodic annulus, R-side vertex to
// L-side vertex; transverse annuli and periodic tori land in anomalies.
ExtendedOrbitGraph build_graph(const Skeleton& sk, const RegionDecomposition& deco,
                               const VertexPartition& part, const GridDomain& domain);

struct DagResult {
  bool acyclic = true;
  std::vector<int> witness;  // vertex cycle, first == last, when cyclic
};

// Kahn sort over the edges; self-loop edges are bookkeeping artifacts of
// vertex merging and stay out of the cycle check.
DagResult is_dag(const ExtendedOrbitGraph& g);

std::string graph_to_json(const ExtendedOrbitGraph& g);
std::string graph_to_dot(const ExtendedOrbitGraph& g);

}  // namespace hamflow
