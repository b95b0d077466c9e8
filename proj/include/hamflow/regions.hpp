#pragma once

#include <map>
#include <string>
#include <vector>

#include "hamflow/orbits.hpp"

namespace hamflow {

enum class RegionClass {
  TrivialFlowBox,
  PeriodicAnnulus,
  TransverseAnnulus,
  PeriodicTorus,
  Unclassified
};

const char* region_class_name(RegionClass c);

struct SkeletonObjRef {
  enum class Kind { Separatrix, Cycle, SingularPoint, End, BoundaryOrbit };
  Kind kind = Kind::Separatrix;
  int id = -1;

  bool operator==(const SkeletonObjRef& o) const { return kind == o.kind && id == o.id; }
  bool operator<(const SkeletonObjRef& o) const {
    if (kind != o.kind) return static_cast<int>(kind) < static_cast<int>(o.kind);
    return id < o.id;
  }
  std::string str() const;
};

struct Region {
  int id = -1;
  std::vector<int> cells;
  RegionClass cls = RegionClass::Unclassified;
  Vec2 rep_seed;
  Orbit rep_forward;   // forward orbit from the representative seed
  Orbit rep_backward;  // only meaningful when the forward orbit does not close
  // Flow-parallel boundary attribution: side R looks down the local
  // H-gradient, side L up it; edges later run R-vertex -> L-vertex.
  std::vector<SkeletonObjRef> side_r, side_l;
  std::map<SkeletonObjRef, std::vector<Vec2>> hits_r, hits_l;
  Vec2 witness_r, witness_l;  // sample points next to each side, for H checks
  bool witness_valid = false;
  std::vector<int> adjacent_ends;
  std::string issue;  // nonempty when classification or sides failed
};

// Raster of the skeleton onto grid cells plus the region complement.
struct RegionDecomposition {
  std::vector<Region> regions;
  std::vector<int> region_of_cell;              // -1 for blocked cells
  std::vector<SkeletonObjRef> curve_refs;       // rastered curves
  std::vector<std::vector<int>> cell_curves;    // curve indices per cell
  std::vector<std::vector<Vec2>> curve_points;  // polylines (copies)
};

// Flood-fills the complement of the rastered skeleton and classifies each
// component from a deepest-cell representative orbit.
RegionDecomposition decompose_regions(const VectorGrid& f,
                                      const std::vector<SingularCluster>& clusters,
                                      const std::vector<Separatrix>& separatrices,
                                      const std::vector<ClosedOrbit>& skeleton_cycles,
                                      const StopMask& stop,
                                      const std::vector<EndDescriptor>& ends,
                                      const IntegrationParams& ip);

// Fills side_r/side_l plus hit points by walking the local normals from
// stations along the representative orbit.
void side_boundaries(const VectorGrid& f, RegionDecomposition& deco, Region& region,
                     const StopMask& stop, const std::vector<EndDescriptor>& ends,
                     const IntegrationParams& ip);

}  // namespace hamflow
