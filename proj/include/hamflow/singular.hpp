#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hamflow/grid.hpp"

namespace hamflow {

struct SingularCluster {
  int id = -1;
  std::vector<int> cells;  // cell indices, cy * cell_count_x + cx
  Vec2 centroid;
  int diameter_cells = 0;  // max Chebyshev cell distance within the cluster
  double radius = 0;       // reach from centroid to the farthest cell corner
  int winding = 0;         // index of a loop enclosing just this cluster
  bool winding_valid = true;

  bool degenerate() const { return diameter_cells > 2; }
  double stop_radius(const GridDomain& d) const { return radius + d.max_spacing(); }
};

double default_speed_tol(const VectorGrid& f);

// 4-connected clusters of cells that either contain a node slower than
// speed_tol or whose boundary winding number is nonzero. Sorted by centroid.
std::vector<SingularCluster> detect_singular_cells(const VectorGrid& f, double speed_tol);

// Total rotation of the field along a closed polyline divided by 2*pi.
// Segments are bisected until each angle increment is under pi/2.
int poincare_index(const VectorGrid& f, const std::vector<Vec2>& loop, double speed_tol);

struct SectorWord {
  std::string letters;  // cyclic word over {P,H,E} in counterclockwise order

  bool empty() const { return letters.empty(); }
  int count(char c) const;
  int index() const { return 1 + (count('E') - count('H')) / 2; }
  // Lexicographically least rotation, the serialization form.
  std::string normalized() const;
  SectorWord reversed() const;
};

struct TangencyEvent {
  double angle = 0;    // position on the probe circle
  char letter = 'H';   // 'E' if the grazing orbit stays inside, 'H' outside
};

struct SectorAnalysis {
  SectorWord word;
  std::vector<TangencyEvent> tangencies;
  // Refined directions in which separatrices leave or enter the probe
  // circle, one per arc that showed a behavior switch.
  struct SeparatrixRay {
    double angle;
    bool outgoing;      // true when the separatrix crosses the circle outward
    char sector_side;   // letter of the adjacent tangencies
  };
  std::vector<SeparatrixRay> rays;
  double probe_radius = 0;
  bool circulating = false;  // the circle itself follows an orbit
};

struct ProbeParams {
  double speed_tol = 0;
  int samples = 1024;
  long max_probe_steps = 100000;
};

double default_probe_radius(const GridDomain& d, const SingularCluster& c);

// Tangency analysis of the field on a probe circle around one cluster.
SectorAnalysis analyze_sectors(const VectorGrid& f, const std::vector<SingularCluster>& clusters,
                               int cluster_id, double radius, const ProbeParams& pp);

SectorWord sector_word(const VectorGrid& f, const std::vector<SingularCluster>& clusters,
                       int cluster_id, double radius, const ProbeParams& pp);

enum class SingKind { Center, MultiSaddle, Sectored, Degenerate };

const char* sing_kind_name(SingKind k);

struct SingularPoint {
  Vec2 position;
  int index = 0;
  std::optional<SectorWord> word;
  SingKind kind = SingKind::Sectored;
  bool is_end = false;
  int ref = -1;  // cluster id, or end id when is_end
};

// Centers need an empty word and index +1; multi-saddles a pure-H word of
// even length >= 4 agreeing with the winding index. Disagreement between the
// two index routes is reported, not repaired.
SingularPoint classify_singularity(const SectorWord& word, int winding_index,
                                   const SingularCluster& cluster);

}  // namespace hamflow
