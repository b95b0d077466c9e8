#pragma once

#include <optional>
#include <string>

#include "hamflow/grid.hpp"

namespace hamflow {

enum class VerdictStatus { Hamiltonian, NotHamiltonian, OutOfHypothesis };

const char* verdict_status_name(VerdictStatus s);

struct FieldCase {
  std::string name;
  VectorGrid field;
  std::optional<ScalarGrid> hamiltonian;
  std::optional<VerdictStatus> expected_verdict;
  std::string notes;
};

struct FieldData {
  VectorGrid field;
  std::optional<ScalarGrid> hamiltonian;
};

// JSON grid schema, one object per file:
//   {"nx":..,"ny":..,"x0":..,"y0":..,"dx":..,"dy":..,
//    "periodic_x":..,"periodic_y":..,
//    "boundary":{"left":"end|invariant",...},   (non-periodic edges only)
//    "u":[...], "v":[...], "h":[...]}            (h optional)
// Arrays are row-major with the y index in the outer loop.
FieldData load_field_data(const std::string& path);
VectorGrid load_field(const std::string& path);
FieldData parse_field_json(const std::string& text);
std::string field_to_json(const VectorGrid& f, const std::optional<ScalarGrid>& h = std::nullopt);
void save_field(const std::string& path, const VectorGrid& f,
                const std::optional<ScalarGrid>& h = std::nullopt);

// Analytic test flows sampled on resolution^2 nodes.
FieldCase gallery(const std::string& name, int resolution);
const std::vector<std::string>& gallery_names();

struct EquivalenceTransform {
  enum class Kind { Rot90, MirrorX, TimeScale, TimeReverse } kind;
  double scale = 1.0;  // TimeScale only, must be > 0

  static EquivalenceTransform rot90() { return {Kind::Rot90, 1.0}; }
  static EquivalenceTransform mirror_x() { return {Kind::MirrorX, 1.0}; }
  static EquivalenceTransform time_scale(double c) { return {Kind::TimeScale, c}; }
  static EquivalenceTransform time_reverse() { return {Kind::TimeReverse, 1.0}; }
};

// rot90 rotates the domain and vectors a quarter turn counterclockwise
// (square grids with dx==dy only); mirror_x flips the x axis.
VectorGrid apply_equivalence(const VectorGrid& f, const EquivalenceTransform& t);

}  // namespace hamflow
