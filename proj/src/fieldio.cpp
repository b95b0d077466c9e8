#include "hamflow/fieldio.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace hamflow {

using nlohmann::json;

const char* verdict_status_name(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::Hamiltonian: return "hamiltonian";
    case VerdictStatus::NotHamiltonian: return "not_hamiltonian";
    case VerdictStatus::OutOfHypothesis: return "out_of_hypothesis";
  }
  return "unknown";
}

namespace {

BoundaryPolicy parse_policy(const std::string& s) {
  if (s == "end") return BoundaryPolicy::End;
  if (s == "invariant") return BoundaryPolicy::Invariant;
  throw Error(Errc::MalformedFile, "boundary policy must be \"end\" or \"invariant\", got " + s);
}

std::string policy_name(BoundaryPolicy p) {
  return p == BoundaryPolicy::End ? "end" : "invariant";
}

std::vector<double> parse_array(const json& j, const char* key, size_t expect) {
  if (!j.contains(key) || !j[key].is_array())
    throw Error(Errc::MalformedFile, std::string("missing array \"") + key + "\"");
  const auto& a = j[key];
  if (a.size() != expect)
    throw Error(Errc::BadDimensions, std::string("array \"") + key + "\" has " +
                                         std::to_string(a.size()) + " entries, expected " +
                                         std::to_string(expect));
  std::vector<double> out(expect);
  for (size_t i = 0; i < expect; ++i) {
    if (!a[i].is_number())
      throw Error(Errc::MalformedFile, std::string("array \"") + key + "\" holds a non-number");
    out[i] = a[i].get<double>();
    if (!std::isfinite(out[i]))
      throw Error(Errc::NonFiniteValue,
                  std::string("array \"") + key + "\" entry " + std::to_string(i) + " is not finite");
  }
  return out;
}

// The invariant policy requires the field to be tangent to that edge.
void check_invariant_boundaries(const VectorGrid& f) {
  const GridDomain& d = f.domain;
  const double tol = 1e-8 * std::max(1.0, f.max_speed());
  auto fail = [&](const char* edge) {
    throw Error(Errc::MalformedFile,
                std::string("edge \"") + edge +
                    "\" is marked invariant but the field has a normal component there");
  };
  if (d.left == BoundaryPolicy::Invariant)
    for (int iy = 0; iy < d.ny; ++iy)
      if (std::abs(f.at(0, iy).x) > tol) fail("left");
  if (d.right == BoundaryPolicy::Invariant)
    for (int iy = 0; iy < d.ny; ++iy)
      if (std::abs(f.at(d.nx - 1, iy).x) > tol) fail("right");
  if (d.bottom == BoundaryPolicy::Invariant)
    for (int ix = 0; ix < d.nx; ++ix)
      if (std::abs(f.at(ix, 0).y) > tol) fail("bottom");
  if (d.top == BoundaryPolicy::Invariant)
    for (int ix = 0; ix < d.nx; ++ix)
      if (std::abs(f.at(ix, d.ny - 1).y) > tol) fail("top");
}

}  // namespace

FieldData parse_field_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(Errc::MalformedFile, e.what());
  }
  if (!j.is_object()) throw Error(Errc::MalformedFile, "top level must be a JSON object");

  GridDomain d;
  try {
    d.nx = j.at("nx").get<int>();
    d.ny = j.at("ny").get<int>();
    d.x0 = j.at("x0").get<double>();
    d.y0 = j.at("y0").get<double>();
    d.dx = j.at("dx").get<double>();
    d.dy = j.at("dy").get<double>();
    d.periodic_x = j.at("periodic_x").get<bool>();
    d.periodic_y = j.at("periodic_y").get<bool>();
  } catch (const json::exception& e) {
    throw Error(Errc::MalformedFile, e.what());
  }
  if (d.nx < 4 || d.ny < 4) throw Error(Errc::BadDimensions, "grid needs nx>=4 and ny>=4");

  if (j.contains("boundary")) {
    const auto& b = j["boundary"];
    if (!b.is_object()) throw Error(Errc::MalformedFile, "\"boundary\" must be an object");
    auto get = [&](const char* k) -> std::optional<BoundaryPolicy> {
      if (!b.contains(k)) return std::nullopt;
      return parse_policy(b[k].get<std::string>());
    };
    d.left = get("left");
    d.right = get("right");
    d.bottom = get("bottom");
    d.top = get("top");
  }
  d.validate();

  size_t n = static_cast<size_t>(d.nx) * d.ny;
  FieldData out;
  out.field.domain = d;
  out.field.u = parse_array(j, "u", n);
  out.field.v = parse_array(j, "v", n);
  out.field.validate();
  if (j.contains("h")) {
    ScalarGrid h;
    h.domain = d;
    h.values = parse_array(j, "h", n);
    h.validate();
    out.hamiltonian = std::move(h);
  }
  check_invariant_boundaries(out.field);
  return out;
}

FieldData load_field_data(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_field_json(ss.str());
}

VectorGrid load_field(const std::string& path) { return load_field_data(path).field; }

std::string field_to_json(const VectorGrid& f, const std::optional<ScalarGrid>& h) {
  const GridDomain& d = f.domain;
  json j;
  j["nx"] = d.nx;
  j["ny"] = d.ny;
  j["x0"] = d.x0;
  j["y0"] = d.y0;
  j["dx"] = d.dx;
  j["dy"] = d.dy;
  j["periodic_x"] = d.periodic_x;
  j["periodic_y"] = d.periodic_y;
  json b = json::object();
  if (d.left) b["left"] = policy_name(*d.left);
  if (d.right) b["right"] = policy_name(*d.right);
  if (d.bottom) b["bottom"] = policy_name(*d.bottom);
  if (d.top) b["top"] = policy_name(*d.top);
  if (!b.empty()) j["boundary"] = b;
  j["u"] = f.u;
  j["v"] = f.v;
  if (h) j["h"] = h->values;
  return j.dump();
}

void save_field(const std::string& path, const VectorGrid& f, const std::optional<ScalarGrid>& h) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::IoError, "cannot open " + path + " for writing");
  out << field_to_json(f, h) << "\n";
}

VectorGrid apply_equivalence(const VectorGrid& f, const EquivalenceTransform& t) {
  using Kind = EquivalenceTransform::Kind;
  const GridDomain& d = f.domain;
  size_t n = f.u.size();
  VectorGrid out;

  switch (t.kind) {
    case Kind::TimeScale: {
      if (!(t.scale > 0)) throw Error(Errc::ShapeMismatch, "time_scale factor must be positive");
      out = f;
      for (size_t i = 0; i < n; ++i) {
        out.u[i] *= t.scale;
        out.v[i] *= t.scale;
      }
      return out;
    }
    case Kind::TimeReverse: {
      out = f;
      for (size_t i = 0; i < n; ++i) {
        out.u[i] = -out.u[i];
        out.v[i] = -out.v[i];
      }
      return out;
    }
    case Kind::MirrorX: {
      // (x,y) -> (-x,y): u negates, node columns reverse.
      out.domain = d;
      out.domain.x0 = -d.xmax();
      std::swap(out.domain.left, out.domain.right);
      out.u.assign(n, 0.0);
      out.v.assign(n, 0.0);
      for (int iy = 0; iy < d.ny; ++iy)
        for (int ix = 0; ix < d.nx; ++ix) {
          int sx = d.periodic_x ? (d.nx - ix) % d.nx : d.nx - 1 - ix;
          size_t dst = static_cast<size_t>(iy) * d.nx + ix;
          Vec2 w = f.at(sx, iy);
          out.u[dst] = -w.x;
          out.v[dst] = w.y;
        }
      return out;
    }
    case Kind::Rot90: {
      if (d.nx != d.ny || d.dx != d.dy)
        throw Error(Errc::ShapeMismatch, "rot90 needs a square grid with dx == dy");
      if (d.periodic_x != d.periodic_y)
        throw Error(Errc::ShapeMismatch, "rot90 needs matching periodicity on both axes");
      // (x,y) -> (-y,x); node (ix,iy) of the result pulls from (iy, n-1-ix).
      out.domain = d;
      out.domain.x0 = -d.ymax();
      out.domain.y0 = d.x0;
      out.domain.left = d.top;
      out.domain.right = d.bottom;
      out.domain.bottom = d.left;
      out.domain.top = d.right;
      out.u.assign(n, 0.0);
      out.v.assign(n, 0.0);
      for (int iy = 0; iy < d.ny; ++iy)
        for (int ix = 0; ix < d.nx; ++ix) {
          int sx = iy;
          int sy = d.periodic_y ? (d.ny - ix) % d.ny : d.ny - 1 - ix;
          size_t dst = static_cast<size_t>(iy) * d.nx + ix;
          Vec2 w = f.at(sx, sy);
          out.u[dst] = -w.y;
          out.v[dst] = w.x;
        }
      return out;
    }
  }
  throw Error(Errc::UnknownCase, "unhandled transform");
}

}  // namespace hamflow
