#pragma once

#include <koranyi/measure.hpp>

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

// JSON wire format for MeasureSpec, Point, and Similarity.  Serialization is
// deterministic (insertion-ordered keys, shortest round-trip doubles), and
// parsing validates strictly: unknown keys, missing fields, wrong types, and
// geometric invariant violations (non-unit directions, non-orthonormal bases,
// invalid rotations) are all rejected with spec_error.  Parsed numeric data
// is used verbatim -- never re-normalized -- so serialize/parse/serialize is
// byte-identical.

namespace koranyi {

using ordered_json = nlohmann::ordered_json;

/// A malformed or invalid measure description.  Everything the parser rejects
/// surfaces as this type so callers can map it to a dedicated exit path.
struct spec_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

namespace detail_json {

inline const ordered_json& field(const ordered_json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw spec_error(std::string("missing field \"") + key + '"');
  return *it;
}

inline void check_keys(const ordered_json& j,
                       std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw spec_error("expected a JSON object");
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : allowed) ok = ok || item.key() == k;
    if (!ok) throw spec_error("unknown field \"" + item.key() + '"');
  }
}

inline double number(const ordered_json& j, const char* key) {
  const auto& f = field(j, key);
  if (!f.is_number()) throw spec_error(std::string("field \"") + key + "\" must be a number");
  const double v = f.get<double>();
  if (!std::isfinite(v)) throw spec_error(std::string("field \"") + key + "\" must be finite");
  return v;
}

inline int integer(const ordered_json& j, const char* key) {
  const auto& f = field(j, key);
  if (!f.is_number_integer()) throw spec_error(std::string("field \"") + key + "\" must be an integer");
  return f.get<int>();
}

inline bool boolean(const ordered_json& j, const char* key) {
  const auto& f = field(j, key);
  if (!f.is_boolean()) throw spec_error(std::string("field \"") + key + "\" must be a boolean");
  return f.get<bool>();
}

inline std::string text(const ordered_json& j, const char* key) {
  const auto& f = field(j, key);
  if (!f.is_string()) throw spec_error(std::string("field \"") + key + "\" must be a string");
  return f.get<std::string>();
}

inline Eigen::VectorXd vector(const ordered_json& f, const char* what) {
  if (!f.is_array() || f.empty()) throw spec_error(std::string(what) + " must be a non-empty array");
  Eigen::VectorXd v(f.size());
  Eigen::Index i = 0;
  for (const auto& e : f) {
    if (!e.is_number()) throw spec_error(std::string(what) + " must contain numbers");
    v[i] = e.get<double>();
    if (!std::isfinite(v[i])) throw spec_error(std::string(what) + " must be finite");
    ++i;
  }
  return v;
}

inline Eigen::Vector2d vector2(const ordered_json& j, const char* key) {
  const Eigen::VectorXd v = vector(field(j, key), key);
  if (v.size() != 2) throw spec_error(std::string("field \"") + key + "\" must have length 2");
  return Eigen::Vector2d(v[0], v[1]);
}

inline ordered_json to_array(const Eigen::VectorXd& v) {
  ordered_json a = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline void require_unit(const Eigen::Vector2d& v, const char* key) {
  if (std::abs(v.norm() - 1.0) > 1e-9)
    throw spec_error(std::string("field \"") + key + "\" must be a unit vector");
}

}  // namespace detail_json

// ---------------------------------------------------------------------------
// Point.

inline ordered_json point_to_json(const Point& p) {
  return detail_json::to_array(p.coords);
}

inline Point point_from_json(const ordered_json& j, int expect_n = 0) {
  const Eigen::VectorXd v = detail_json::vector(j, "point");
  if (v.size() < 3 || v.size() % 2 == 0)
    throw spec_error("point must have odd length >= 3");
  if (expect_n > 0 && v.size() != 2 * expect_n + 1)
    throw spec_error("point has the wrong dimension for this spec");
  return Point(v);
}

// ---------------------------------------------------------------------------
// Similarity.

inline ordered_json similarity_to_json(const Similarity& s) {
  ordered_json j;
  j["translation"] = point_to_json(s.translation_part());
  ordered_json rows = ordered_json::array();
  const auto& u = s.rotation_part();
  for (Eigen::Index r = 0; r < u.rows(); ++r)
    rows.push_back(detail_json::to_array(u.row(r).transpose()));
  j["rotation"] = rows;
  j["reflect"] = s.reflect_part();
  j["scale"] = s.scale();
  return j;
}

inline Similarity similarity_from_json(const ordered_json& j, int expect_n = 0) {
  detail_json::check_keys(j, {"translation", "rotation", "reflect", "scale"});
  const Point q = point_from_json(detail_json::field(j, "translation"), expect_n);
  const int n = q.n();
  const auto& rows = detail_json::field(j, "rotation");
  if (!rows.is_array() || static_cast<int>(rows.size()) != 2 * n)
    throw spec_error("rotation must be a 2n x 2n array of rows");
  Eigen::MatrixXd u(2 * n, 2 * n);
  for (int r = 0; r < 2 * n; ++r) {
    const Eigen::VectorXd row = detail_json::vector(rows[r], "rotation row");
    if (row.size() != 2 * n) throw spec_error("rotation must be a 2n x 2n array of rows");
    u.row(r) = row.transpose();
  }
  const bool reflect = detail_json::boolean(j, "reflect");
  const double scale = detail_json::number(j, "scale");
  try {
    return Similarity(q, u, reflect, scale);
  } catch (const std::invalid_argument& e) {
    throw spec_error(e.what());
  }
}

// ---------------------------------------------------------------------------
// MeasureSpec.

inline ordered_json measure_to_json(const MeasureSpec& mu);

namespace detail_json {

inline ordered_json curve_to_json(const CurveSpec& c) {
  ordered_json j;
  if (const auto* circ = std::get_if<CircleArcs>(&c.family)) {
    j["family"] = "circle-arcs";
    j["center"] = to_array(circ->center);
    j["radius"] = circ->radius;
    j["heights"] = to_array(Eigen::Map<const Eigen::VectorXd>(
        circ->heights.data(), static_cast<Eigen::Index>(circ->heights.size())));
  } else if (const auto* lines = std::get_if<VerticalLines>(&c.family)) {
    j["family"] = "vertical-lines";
    ordered_json pts = ordered_json::array();
    for (const auto& p : lines->through) pts.push_back(to_array(p));
    j["through"] = pts;
  } else if (const auto* hl = std::get_if<HorizontalLine>(&c.family)) {
    j["family"] = "horizontal-line";
    j["base"] = point_to_json(hl->base);
    j["direction"] = to_array(hl->direction);
  } else {
    const auto& lc = std::get<LiftedCircle>(c.family);
    j["family"] = "lifted-circle";
    j["center"] = to_array(lc.center);
    j["radius"] = lc.radius;
    j["height0"] = lc.height0;
    j["orientation"] = lc.orientation;
  }
  j["density"] = c.density;
  return j;
}

inline CurveSpec curve_from_json(const ordered_json& j) {
  const std::string family = text(j, "family");
  CurveSpec out;
  if (family == "circle-arcs") {
    check_keys(j, {"family", "center", "radius", "heights", "density"});
    CircleArcs circ;
    circ.center = vector2(j, "center");
    circ.radius = number(j, "radius");
    if (!(circ.radius > 0.0)) throw spec_error("circle-arcs: radius must be positive");
    const Eigen::VectorXd hs = vector(field(j, "heights"), "heights");
    circ.heights.assign(hs.data(), hs.data() + hs.size());
    out.family = std::move(circ);
  } else if (family == "vertical-lines") {
    check_keys(j, {"family", "through", "density"});
    VerticalLines lines;
    const auto& pts = field(j, "through");
    if (!pts.is_array() || pts.empty())
      throw spec_error("vertical-lines: \"through\" must be a non-empty array");
    for (const auto& p : pts) {
      const Eigen::VectorXd v = vector(p, "through entry");
      if (v.size() != 2) throw spec_error("vertical-lines: entries must have length 2");
      lines.through.emplace_back(v[0], v[1]);
    }
    out.family = std::move(lines);
  } else if (family == "horizontal-line") {
    check_keys(j, {"family", "base", "direction", "density"});
    HorizontalLine hl;
    hl.base = point_from_json(field(j, "base"), 1);
    hl.direction = vector2(j, "direction");
    require_unit(hl.direction, "direction");
    out.family = std::move(hl);
  } else if (family == "lifted-circle") {
    check_keys(j, {"family", "center", "radius", "height0", "orientation", "density"});
    LiftedCircle lc;
    lc.center = vector2(j, "center");
    lc.radius = number(j, "radius");
    if (!(lc.radius > 0.0)) throw spec_error("lifted-circle: radius must be positive");
    lc.height0 = number(j, "height0");
    lc.orientation = integer(j, "orientation");
    if (lc.orientation != 1 && lc.orientation != -1)
      throw spec_error("lifted-circle: orientation must be +-1");
    out.family = std::move(lc);
  } else {
    throw spec_error("unknown curve family \"" + family + '"');
  }
  out.density = number(j, "density");
  if (!(out.density > 0.0)) throw spec_error("curve: density must be positive");
  return out;
}

inline ordered_json surface_to_json(const SurfaceSpec& s) {
  ordered_json j;
  if (const auto* plane = std::get_if<VerticalPlane>(&s.family)) {
    j["family"] = "vertical-plane";
    j["origin"] = to_array(plane->origin);
    j["direction"] = to_array(plane->direction);
  } else if (const auto* cyl = std::get_if<Cylinder>(&s.family)) {
    j["family"] = "cylinder";
    j["center"] = to_array(cyl->center);
    j["radius"] = cyl->radius;
  } else {
    j["family"] = "light-cone-patch";
    j["k"] = std::get<LightConePatch>(s.family).k;
  }
  j["density"] = s.density;
  return j;
}

inline SurfaceSpec surface_from_json(const ordered_json& j, int n) {
  const std::string family = text(j, "family");
  SurfaceSpec out;
  if (family == "vertical-plane") {
    check_keys(j, {"family", "origin", "direction", "density"});
    VerticalPlane plane;
    plane.origin = vector2(j, "origin");
    plane.direction = vector2(j, "direction");
    require_unit(plane.direction, "direction");
    out.family = plane;
  } else if (family == "cylinder") {
    check_keys(j, {"family", "center", "radius", "density"});
    Cylinder cyl;
    cyl.center = vector2(j, "center");
    cyl.radius = number(j, "radius");
    if (!(cyl.radius > 0.0)) throw spec_error("cylinder: radius must be positive");
    out.family = cyl;
  } else if (family == "light-cone-patch") {
    check_keys(j, {"family", "k", "density"});
    LightConePatch cone;
    cone.k = integer(j, "k");
    if (!(n >= 4 && cone.k >= 4 && cone.k <= n))
      throw spec_error("light-cone-patch: need 4 <= k <= n");
    out.family = cone;
  } else {
    throw spec_error("unknown surface family \"" + family + '"');
  }
  out.density = number(j, "density");
  if (!(out.density > 0.0)) throw spec_error("surface: density must be positive");
  return out;
}

}  // namespace detail_json

inline ordered_json measure_to_json(const MeasureSpec& mu) {
  ordered_json j;
  j["schema"] = measure_schema_version;
  std::visit(
      [&](const auto& payload) {
        using T = std::decay_t<decltype(payload)>;
        if constexpr (std::is_same_v<T, AtomicSpec>) {
          j["kind"] = "atomic";
          j["n"] = mu.n;
          ordered_json atoms = ordered_json::array();
          for (const auto& a : payload.atoms) {
            ordered_json atom;
            atom["point"] = point_to_json(a.point);
            atom["weight"] = a.weight;
            atoms.push_back(std::move(atom));
          }
          j["atoms"] = std::move(atoms);
        } else if constexpr (std::is_same_v<T, CurveSpec>) {
          j["kind"] = "curve";
          j["n"] = mu.n;
          j["curve"] = detail_json::curve_to_json(payload);
        } else if constexpr (std::is_same_v<T, SurfaceSpec>) {
          j["kind"] = "surface";
          j["n"] = mu.n;
          j["surface"] = detail_json::surface_to_json(payload);
        } else if constexpr (std::is_same_v<T, SubgroupHaarSpec>) {
          j["kind"] = "subgroup-haar";
          j["n"] = mu.n;
          j["vertical"] = payload.vertical;
          ordered_json basis = ordered_json::array();
          for (const auto& b : payload.hbasis) basis.push_back(detail_json::to_array(b));
          j["hbasis"] = std::move(basis);
        } else if constexpr (std::is_same_v<T, HeatProductSpec>) {
          j["kind"] = "heat-product";
          j["n"] = mu.n;
          j["base"] = measure_to_json(*payload.base);
          j["base_dim"] = payload.base_dim;
        } else {
          static_assert(std::is_same_v<T, TransformedSpec>);
          j["kind"] = "transformed";
          j["n"] = mu.n;
          j["inner"] = measure_to_json(*payload.inner);
          j["map"] = similarity_to_json(payload.map);
          j["mass_scale"] = payload.mass_scale;
        }
      },
      mu.payload);
  return j;
}

inline MeasureSpec measure_from_json(const ordered_json& j) {
  if (!j.is_object()) throw spec_error("measure spec must be a JSON object");
  if (detail_json::integer(j, "schema") != measure_schema_version)
    throw spec_error("unsupported schema version");
  const std::string kind = detail_json::text(j, "kind");
  const int n = detail_json::integer(j, "n");
  if (n < 1) throw spec_error("field \"n\" must be >= 1");

  if (kind == "atomic") {
    detail_json::check_keys(j, {"schema", "kind", "n", "atoms"});
    const auto& atoms_json = detail_json::field(j, "atoms");
    if (!atoms_json.is_array() || atoms_json.empty())
      throw spec_error("atomic: \"atoms\" must be a non-empty array");
    std::vector<Atom> atoms;
    for (const auto& aj : atoms_json) {
      detail_json::check_keys(aj, {"point", "weight"});
      Atom a;
      a.point = point_from_json(detail_json::field(aj, "point"), n);
      a.weight = detail_json::number(aj, "weight");
      atoms.push_back(std::move(a));
    }
    try {
      return make_atomic(n, std::move(atoms));
    } catch (const std::invalid_argument& e) {
      throw spec_error(e.what());
    }
  }

  if (kind == "curve") {
    detail_json::check_keys(j, {"schema", "kind", "n", "curve"});
    if (n != 1) throw spec_error("curve: only n = 1 is supported");
    return MeasureSpec{1, detail_json::curve_from_json(detail_json::field(j, "curve"))};
  }

  if (kind == "surface") {
    detail_json::check_keys(j, {"schema", "kind", "n", "surface"});
    SurfaceSpec s = detail_json::surface_from_json(detail_json::field(j, "surface"), n);
    if (!std::holds_alternative<LightConePatch>(s.family) && n != 1)
      throw spec_error("surface: this family supports only n = 1");
    return MeasureSpec{n, std::move(s)};
  }

  if (kind == "subgroup-haar") {
    detail_json::check_keys(j, {"schema", "kind", "n", "vertical", "hbasis"});
    SubgroupHaarSpec sub;
    sub.vertical = detail_json::boolean(j, "vertical");
    const auto& basis = detail_json::field(j, "hbasis");
    if (!basis.is_array()) throw spec_error("subgroup-haar: \"hbasis\" must be an array");
    for (const auto& bj : basis) {
      Eigen::VectorXd b = detail_json::vector(bj, "hbasis entry");
      if (b.size() != 2 * n)
        throw spec_error("subgroup-haar: basis vectors must have length 2n");
      sub.hbasis.push_back(std::move(b));
    }
    if (!sub.vertical && sub.hbasis.empty())
      throw spec_error("subgroup-haar: horizontal subgroup needs a direction");
    // Stored bases are orthonormal by construction; parsed data must already
    // satisfy that so it can be used verbatim (re-normalizing would break
    // byte-identical round trips).
    for (std::size_t a = 0; a < sub.hbasis.size(); ++a)
      for (std::size_t b = 0; b <= a; ++b) {
        const double want = (a == b) ? 1.0 : 0.0;
        if (std::abs(sub.hbasis[a].dot(sub.hbasis[b]) - want) > 1e-9)
          throw spec_error("subgroup-haar: hbasis must be orthonormal");
      }
    if (!sub.vertical) {
      try {
        detail::check_isotropic(sub.hbasis, "subgroup-haar");
      } catch (const std::invalid_argument& e) {
        throw spec_error(e.what());
      }
    }
    return MeasureSpec{n, std::move(sub)};
  }

  if (kind == "heat-product") {
    detail_json::check_keys(j, {"schema", "kind", "n", "base", "base_dim"});
    MeasureSpec base = measure_from_json(detail_json::field(j, "base"));
    const int base_dim = detail_json::integer(j, "base_dim");
    if (base_dim != n) throw spec_error("heat-product: base_dim must equal n");
    try {
      return heat_product_measure(std::move(base), base_dim);
    } catch (const std::invalid_argument& e) {
      throw spec_error(e.what());
    }
  }

  if (kind == "transformed") {
    detail_json::check_keys(j, {"schema", "kind", "n", "inner", "map", "mass_scale"});
    auto inner =
        std::make_shared<MeasureSpec>(measure_from_json(detail_json::field(j, "inner")));
    if (inner->n != n) throw spec_error("transformed: inner spec has a different n");
    Similarity map = similarity_from_json(detail_json::field(j, "map"), n);
    const double mass_scale = detail_json::number(j, "mass_scale");
    if (!(mass_scale > 0.0)) throw spec_error("transformed: mass_scale must be positive");
    return MeasureSpec{n, TransformedSpec{std::move(inner), std::move(map), mass_scale}};
  }

  throw spec_error("unknown measure kind \"" + kind + '"');
}

/// Parse a measure spec from JSON text; every defect maps to spec_error.
inline MeasureSpec parse_measure(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw spec_error(std::string("invalid JSON: ") + e.what());
  }
  return measure_from_json(j);
}

inline std::string measure_to_string(const MeasureSpec& mu, int indent = 2) {
  return measure_to_json(mu).dump(indent);
}

inline MeasureSpec load_measure_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw spec_error("cannot open spec file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_measure(buf.str());
}

}  // namespace koranyi
