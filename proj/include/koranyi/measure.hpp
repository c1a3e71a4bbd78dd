#pragma once

#include <koranyi/core.hpp>
#include <koranyi/numerics.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

// Measure descriptions.  A MeasureSpec is a closed, serializable enumeration
// of the measures the lab can evaluate: weighted atoms, parametrized curves
// and surfaces with constant parameter density, Haar measures of homogeneous
// subgroups, heat-metric products, and similarity pushforwards.  Specs are
// immutable value types; the ball engine pattern-matches on them.

namespace koranyi {

struct MeasureSpec;

// ---------------------------------------------------------------------------
// Payloads.

struct Atom {
  Point point;
  double weight = 1.0;
};

struct AtomicSpec {
  std::vector<Atom> atoms;
};

/// Horizontal circles |x' - center| = radius at each listed height (n = 1).
/// Mass element: density * dtheta per circle.
struct CircleArcs {
  Eigen::Vector2d center{0.0, 0.0};
  double radius = 1.0;
  std::vector<double> heights{0.0};
};

/// Vertical lines {(c, t) : t in R} through each listed horizontal point
/// (n = 1).  Mass element: density * dt per line.
struct VerticalLines {
  std::vector<Eigen::Vector2d> through;
};

/// Left coset of a horizontal one-parameter subgroup: t -> base * (t v, 0)
/// with |v| = 1 (n = 1).  Mass element: density * dt.
struct HorizontalLine {
  Point base{0.0, 0.0, 0.0};
  Eigen::Vector2d direction{1.0, 0.0};
};

/// One turn of the horizontal lift of a planar circle (n = 1), starting at
/// height height0.  The lift of a full turn does not close up (each turn
/// shifts the height by -orientation * 4 pi R^2), so this is a helix arc over
/// theta in [0, 2 pi).  Mass element: density * dtheta.
struct LiftedCircle {
  Eigen::Vector2d center{1.0, 0.0};
  double radius = 1.0;
  double height0 = 0.0;
  int orientation = 1;  // +1 counterclockwise, -1 clockwise
};

struct CurveSpec {
  std::variant<CircleArcs, VerticalLines, HorizontalLine, LiftedCircle> family;
  double density = 1.0;
};

/// Ruled vertical plane {(origin + s * direction, t)} with |direction| = 1
/// (n = 1).  Mass element: density * ds dt.
struct VerticalPlane {
  Eigen::Vector2d origin{0.0, 0.0};
  Eigen::Vector2d direction{0.0, 1.0};
};

/// Vertical cylinder |x' - center| = radius (n = 1).  Mass element:
/// density * dtheta dt.
struct Cylinder {
  Eigen::Vector2d center{0.0, 0.0};
  double radius = 1.0;
};

/// The double cone x1^2+x2^2+x3^2 = x4^2 placed in the first four horizontal
/// slots of H^n, with slots 5..k left free and everything else zero
/// (4 <= k <= n, so the occupied slots span an isotropic subspace and the
/// gauge metric restricts to the Euclidean one there).  Mass element: the
/// cone's surface measure (graph density sqrt(2) dx^ over each branch) times
/// Lebesgue on the free slots, times density.
struct LightConePatch {
  int k = 4;
};

struct SurfaceSpec {
  std::variant<VerticalPlane, Cylinder, LightConePatch> family;
  double density = 1.0;
};

/// Haar (= Lebesgue) measure of a homogeneous subgroup.  The stored basis
/// spans the horizontal part and is kept orthonormal, so the measure is the
/// intrinsic Lebesgue measure of the subspace; vertical subgroups contain the
/// whole vertical axis in addition.  Horizontal subgroups must be isotropic
/// (the symplectic form vanishes pairwise), which is exactly closure under
/// the group law without picking up a vertical component.
struct SubgroupHaarSpec {
  bool vertical = false;
  std::vector<Eigen::VectorXd> hbasis;  // vectors in R^{2n}, orthonormal

  /// Topological dimension of the subgroup.
  int k() const { return static_cast<int>(hbasis.size()) + (vertical ? 1 : 0); }
  /// Metric growth exponent of its Haar measure.
  int k_prime() const { return k() + (vertical ? 1 : 0); }
};

/// Product measure (base x Lebesgue) on S x R carried into H^M through the
/// isometric embedding of the heat metric onto the subgroup
/// {(y_1..y_M, 0, .., 0, t)}: the resulting MeasureSpec has n = M and its
/// support lies on that subgroup.  The base MeasureSpec is read as a
/// Euclidean measure on R^M via its coordinates; allowed base kinds:
/// atomic, subgroup-haar, light-cone-patch.
struct HeatProductSpec {
  std::shared_ptr<const MeasureSpec> base;
  int base_dim = 1;  // M: Euclidean ambient dimension of the base support
};

/// Pushforward mass_scale * S_#(inner).  Ball masses delegate to the inner
/// spec: mu'(B(x, r)) = mass_scale * mu(B(S^{-1} x, r / S.scale())).
struct TransformedSpec {
  std::shared_ptr<const MeasureSpec> inner;
  Similarity map;
  double mass_scale = 1.0;
};

struct MeasureSpec {
  int n = 1;
  std::variant<AtomicSpec, CurveSpec, SurfaceSpec, SubgroupHaarSpec, HeatProductSpec,
               TransformedSpec>
      payload;
};

inline constexpr int measure_schema_version = 1;

// ---------------------------------------------------------------------------
// Constructors.  All of them validate; invalid input throws
// std::invalid_argument.

namespace detail {

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace detail

inline MeasureSpec make_atomic(int n, std::vector<Atom> atoms) {
  detail::require(!atoms.empty(), "make_atomic: need at least one atom");
  for (const auto& a : atoms) {
    detail::require(a.point.n() == n, "make_atomic: atom dimension mismatch");
    detail::require(a.weight > 0.0 && std::isfinite(a.weight),
                    "make_atomic: weights must be positive and finite");
  }
  return MeasureSpec{n, AtomicSpec{std::move(atoms)}};
}

/// Counting measure of a regular m-gon inscribed in the unit circle of the
/// horizontal plane at the given height; phase (radians) rotates the first
/// vertex.  Quarter-turn vertices come out bit-exact (see cos_turn).
inline MeasureSpec make_polygon_counting(int m, double phase = 0.0, double height = 0.0,
                                         double weight = 1.0) {
  detail::require(m >= 1, "make_polygon_counting: need m >= 1");
  std::vector<Atom> atoms;
  atoms.reserve(static_cast<std::size_t>(m));
  const double phase_turns = phase / (2.0 * M_PI);
  for (int j = 0; j < m; ++j) {
    const double t = phase_turns + static_cast<double>(j) / m;
    atoms.push_back({Point(cos_turn(t), sin_turn(t), height), weight});
  }
  return make_atomic(1, std::move(atoms));
}

/// Two regular m-gons on unit circles at heights +delta and -delta
/// (delta = 0 puts both on a common circle).
inline MeasureSpec make_polygon_pair(int m, double phase1, double phase2, double delta) {
  auto a = make_polygon_counting(m, phase1, delta);
  auto b = make_polygon_counting(m, phase2, -delta);
  auto& atoms = std::get<AtomicSpec>(a.payload).atoms;
  auto& more = std::get<AtomicSpec>(b.payload).atoms;
  atoms.insert(atoms.end(), more.begin(), more.end());
  return a;
}

inline MeasureSpec make_circle_measure(double height = 0.0,
                                       Eigen::Vector2d center = {0.0, 0.0},
                                       double radius = 1.0, double density = 1.0) {
  detail::require(radius > 0.0 && std::isfinite(radius),
                  "make_circle_measure: radius must be positive");
  detail::require(density > 0.0 && std::isfinite(density),
                  "make_circle_measure: density must be positive");
  return MeasureSpec{1, CurveSpec{CircleArcs{center, radius, {height}}, density}};
}

/// Unit circles centered on the vertical axis at two heights a < b.
inline MeasureSpec make_circle_pair(double a, double b, double density = 1.0) {
  detail::require(a < b, "make_circle_pair: need heights a < b");
  return MeasureSpec{1, CurveSpec{CircleArcs{{0.0, 0.0}, 1.0, {a, b}}, density}};
}

inline MeasureSpec make_vertical_line(Eigen::Vector2d through, double density = 1.0) {
  return MeasureSpec{1, CurveSpec{VerticalLines{{through}}, density}};
}

/// Vertical lines through the vertices of a regular m-gon on the unit circle.
inline MeasureSpec make_vertical_lines_through_polygon(int m, double phase = 0.0,
                                                       double density = 1.0) {
  detail::require(m >= 1, "make_vertical_lines_through_polygon: need m >= 1");
  VerticalLines lines;
  const double phase_turns = phase / (2.0 * M_PI);
  for (int j = 0; j < m; ++j) {
    const double t = phase_turns + static_cast<double>(j) / m;
    lines.through.emplace_back(cos_turn(t), sin_turn(t));
  }
  return MeasureSpec{1, CurveSpec{std::move(lines), density}};
}

inline MeasureSpec make_horizontal_line(Point base = Point(0.0, 0.0, 0.0),
                                        Eigen::Vector2d direction = {1.0, 0.0},
                                        double density = 1.0) {
  detail::require(base.n() == 1, "make_horizontal_line: base must live in H^1");
  const double len = direction.norm();
  detail::require(len > 1e-12 && std::isfinite(len), "make_horizontal_line: bad direction");
  return MeasureSpec{1, CurveSpec{HorizontalLine{base, direction / len}, density}};
}

inline MeasureSpec make_lifted_circle(Eigen::Vector2d center, double radius,
                                      double height0 = 0.0, int orientation = 1,
                                      double density = 1.0) {
  detail::require(radius > 0.0, "make_lifted_circle: radius must be positive");
  detail::require(orientation == 1 || orientation == -1,
                  "make_lifted_circle: orientation must be +-1");
  return MeasureSpec{
      1, CurveSpec{LiftedCircle{center, radius, height0, orientation}, density}};
}

inline MeasureSpec make_cylinder(Eigen::Vector2d center = {0.0, 0.0}, double radius = 1.0,
                                 double density = 1.0) {
  detail::require(radius > 0.0, "make_cylinder: radius must be positive");
  return MeasureSpec{1, SurfaceSpec{Cylinder{center, radius}, density}};
}

inline MeasureSpec make_vertical_plane(Eigen::Vector2d origin = {0.0, 0.0},
                                       Eigen::Vector2d direction = {0.0, 1.0},
                                       double density = 1.0) {
  const double len = direction.norm();
  detail::require(len > 1e-12 && std::isfinite(len), "make_vertical_plane: bad direction");
  return MeasureSpec{1, SurfaceSpec{VerticalPlane{origin, direction / len}, density}};
}

inline MeasureSpec make_light_cone(int n, int k, double density = 1.0) {
  detail::require(n >= 4 && k >= 4 && k <= n, "make_light_cone: need 4 <= k <= n");
  return MeasureSpec{n, SurfaceSpec{LightConePatch{k}, density}};
}

namespace detail {

/// Gram-Schmidt returning an orthonormal basis; throws on near-dependence.
inline std::vector<Eigen::VectorXd> orthonormalize(std::vector<Eigen::VectorXd> vs,
                                                   const char* who) {
  for (std::size_t i = 0; i < vs.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) vs[i] -= vs[j].dot(vs[i]) * vs[j];
    const double len = vs[i].norm();
    require(len > 1e-10, std::string(who) + ": basis vectors are linearly dependent");
    vs[i] /= len;
  }
  return vs;
}

inline void check_isotropic(const std::vector<Eigen::VectorXd>& vs, const char* who) {
  for (std::size_t i = 0; i < vs.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      require(std::abs(symplectic_form(vs[i], vs[j])) <= 1e-10,
              std::string(who) +
                  ": horizontal subgroup requires an isotropic subspace "
                  "(the symplectic form must vanish pairwise)");
}

}  // namespace detail

/// Haar measure of the homogeneous subgroup spanned by the given horizontal
/// vectors (plus the vertical axis when vertical = true).
inline MeasureSpec make_subgroup_haar(int n, bool vertical,
                                      std::vector<Eigen::VectorXd> hbasis) {
  detail::require(n >= 1, "make_subgroup_haar: need n >= 1");
  for (const auto& v : hbasis) {
    detail::require(v.size() == 2 * n,
                    "make_subgroup_haar: basis vectors must lie in R^{2n}");
    detail::require(v.allFinite(), "make_subgroup_haar: basis vectors must be finite");
  }
  detail::require(vertical || !hbasis.empty(),
                  "make_subgroup_haar: horizontal subgroup needs at least one direction");
  auto onb = detail::orthonormalize(std::move(hbasis), "make_subgroup_haar");
  if (!vertical) detail::check_isotropic(onb, "make_subgroup_haar");
  return MeasureSpec{n, SubgroupHaarSpec{vertical, std::move(onb)}};
}

/// The vertical axis {(0, .., 0, t)}.
inline MeasureSpec make_vertical_axis(int n) { return make_subgroup_haar(n, true, {}); }

/// The horizontal coordinate subgroup spanned by e_1..e_k (isotropic since
/// k <= n).
inline MeasureSpec make_horizontal_subgroup(int n, int k) {
  detail::require(k >= 1 && k <= n, "make_horizontal_subgroup: need 1 <= k <= n");
  std::vector<Eigen::VectorXd> basis;
  for (int j = 0; j < k; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(2 * n);
    e[j] = 1.0;
    basis.push_back(std::move(e));
  }
  return make_subgroup_haar(n, false, std::move(basis));
}

namespace detail {

inline bool coords_vanish_from(const Eigen::VectorXd& v, int from) {
  for (Eigen::Index i = from; i < v.size(); ++i)
    if (v[i] != 0.0) return false;
  return true;
}

}  // namespace detail

/// Product of a Euclidean base measure on R^M with Lebesgue on an extra line,
/// metrized by the heat metric and realized inside H^M (see HeatProductSpec).
/// The base's support must be contained in the first base_dim coordinates.
inline MeasureSpec heat_product_measure(MeasureSpec base, int base_dim) {
  const int nb = base.n;
  detail::require(base_dim >= 1 && base_dim <= 2 * nb + 1,
                  "heat_product_measure: base_dim out of range");
  if (const auto* atomic = std::get_if<AtomicSpec>(&base.payload)) {
    for (const auto& a : atomic->atoms)
      detail::require(detail::coords_vanish_from(a.point.coords, base_dim),
                      "heat_product_measure: atom has support outside R^base_dim");
  } else if (const auto* sub = std::get_if<SubgroupHaarSpec>(&base.payload)) {
    if (sub->vertical)
      detail::require(base_dim == 2 * nb + 1,
                      "heat_product_measure: vertical base subgroup needs base_dim = 2n+1");
    for (const auto& b : sub->hbasis)
      detail::require(detail::coords_vanish_from(b, base_dim),
                      "heat_product_measure: basis vector outside R^base_dim");
  } else if (const auto* surf = std::get_if<SurfaceSpec>(&base.payload)) {
    const auto* cone = std::get_if<LightConePatch>(&surf->family);
    detail::require(cone != nullptr,
                    "heat_product_measure: surface bases must be light-cone patches");
    detail::require(cone->k <= base_dim,
                    "heat_product_measure: cone occupies slots beyond base_dim");
  } else {
    throw std::invalid_argument(
        "heat_product_measure: base kind must be atomic, subgroup-haar, or a "
        "light-cone patch");
  }
  return MeasureSpec{
      base_dim,
      HeatProductSpec{std::make_shared<MeasureSpec>(std::move(base)), base_dim}};
}

/// Pushforward mass_scale * S_#(mu).  Atomic measures are materialized (the
/// atoms move); transformed measures are flattened by composing the maps;
/// everything else is wrapped for lazy evaluation in the ball engine.
inline MeasureSpec transform_measure(const MeasureSpec& mu, const Similarity& s,
                                     double mass_scale = 1.0) {
  detail::require(mu.n == s.n(), "transform_measure: dimension mismatch");
  detail::require(mass_scale > 0.0 && std::isfinite(mass_scale),
                  "transform_measure: mass_scale must be positive and finite");
  if (const auto* atomic = std::get_if<AtomicSpec>(&mu.payload)) {
    std::vector<Atom> moved;
    moved.reserve(atomic->atoms.size());
    for (const auto& a : atomic->atoms)
      moved.push_back({s(a.point), a.weight * mass_scale});
    return MeasureSpec{mu.n, AtomicSpec{std::move(moved)}};
  }
  if (const auto* wrapped = std::get_if<TransformedSpec>(&mu.payload)) {
    return MeasureSpec{mu.n, TransformedSpec{wrapped->inner, compose(s, wrapped->map),
                                             wrapped->mass_scale * mass_scale}};
  }
  return MeasureSpec{mu.n,
                     TransformedSpec{std::make_shared<MeasureSpec>(mu), s, mass_scale}};
}

/// Whether the support is a bounded set (gates the support-functional
/// integrals, which only converge for compactly supported measures).
inline bool bounded_support(const MeasureSpec& mu) {
  return std::visit(
      [](const auto& payload) -> bool {
        using T = std::decay_t<decltype(payload)>;
        if constexpr (std::is_same_v<T, AtomicSpec>) {
          return true;
        } else if constexpr (std::is_same_v<T, CurveSpec>) {
          return std::holds_alternative<CircleArcs>(payload.family) ||
                 std::holds_alternative<LiftedCircle>(payload.family);
        } else if constexpr (std::is_same_v<T, TransformedSpec>) {
          return bounded_support(*payload.inner);
        } else {
          return false;
        }
      },
      mu.payload);
}

// ---------------------------------------------------------------------------
// Support geometry helpers shared by the sampler, the residual check, and the
// ball engine.

namespace detail {

/// Point of a lifted circle at parameter theta = 2 pi u turns, u in [0, 1).
/// The height follows the horizontal-lift ODE x3' = 2 (x2 x1' - x1 x2') along
/// the circle, integrated in closed form from theta = 0.
inline Point lifted_circle_point(const LiftedCircle& lc, double u) {
  const double su = lc.orientation * u;
  const double c = cos_turn(su);
  const double s = sin_turn(su);
  const double theta = lc.orientation * (2.0 * M_PI * u);
  const double height =
      lc.height0 - 2.0 * lc.radius * (lc.center[0] * s + lc.center[1] * (1.0 - c)) -
      2.0 * lc.radius * lc.radius * theta;
  return Point(lc.center[0] + lc.radius * c, lc.center[1] + lc.radius * s, height);
}

/// Euclidean distance from (head, w) in R^4 to the double cone |head| = |w|.
inline double cone_distance_r4(double head_norm, double w) {
  return std::abs(head_norm - std::abs(w)) / std::numbers::sqrt2;
}

/// Basis vector of a heat-product base, padded/truncated to length m.
inline Eigen::VectorXd pad_to(const Eigen::VectorXd& v, Eigen::Index m) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(m);
  const Eigen::Index take = std::min(v.size(), m);
  out.head(take) = v.head(take);
  return out;
}

inline Eigen::VectorXd sample_cone_base(const LightConePatch& cone, int ambient,
                                        std::mt19937_64& rng, double window) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_real_distribution<double> box(-window, window);
  double dir[3];
  sphere_direction(rng, dir);
  const double m = window * u01(rng);
  const double sigma = (rng() & 1u) ? 1.0 : -1.0;
  Eigen::VectorXd y = Eigen::VectorXd::Zero(ambient);
  y[0] = m * dir[0];
  y[1] = m * dir[1];
  y[2] = m * dir[2];
  y[3] = sigma * m;
  for (int j = 4; j < cone.k; ++j) y[j] = box(rng);
  return y;
}

inline Eigen::VectorXd sample_heat_base(const MeasureSpec& base, int m,
                                        std::mt19937_64& rng, double window) {
  std::uniform_real_distribution<double> box(-window, window);
  if (const auto* atomic = std::get_if<AtomicSpec>(&base.payload)) {
    const auto& atoms = atomic->atoms;
    const auto& a = atoms[static_cast<std::size_t>(rng() % atoms.size())];
    return a.point.coords.head(m);
  }
  if (const auto* sub = std::get_if<SubgroupHaarSpec>(&base.payload)) {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
    for (const auto& b : sub->hbasis) {
      const double c = box(rng);
      y += c * pad_to(b, m);
    }
    if (sub->vertical) y[m - 1] += box(rng);  // base_dim == 2n+1 was validated
    return y;
  }
  const auto& surf = std::get<SurfaceSpec>(base.payload);
  return sample_cone_base(std::get<LightConePatch>(surf.family), m, rng, window);
}

inline Point sample_one(const MeasureSpec& mu, std::mt19937_64& rng, double window) {
  std::uniform_real_distribution<double> box(-window, window);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  return std::visit(
      [&](const auto& payload) -> Point {
        using T = std::decay_t<decltype(payload)>;
        if constexpr (std::is_same_v<T, AtomicSpec>) {
          const auto& atoms = payload.atoms;
          return atoms[static_cast<std::size_t>(rng() % atoms.size())].point;
        } else if constexpr (std::is_same_v<T, CurveSpec>) {
          if (const auto* circ = std::get_if<CircleArcs>(&payload.family)) {
            const std::size_t hi = static_cast<std::size_t>(rng() % circ->heights.size());
            const double u = u01(rng);
            return Point(circ->center[0] + circ->radius * cos_turn(u),
                         circ->center[1] + circ->radius * sin_turn(u),
                         circ->heights[hi]);
          }
          if (const auto* lines = std::get_if<VerticalLines>(&payload.family)) {
            const std::size_t li = static_cast<std::size_t>(rng() % lines->through.size());
            const double t = box(rng);
            return Point(lines->through[li][0], lines->through[li][1], t);
          }
          if (const auto* hl = std::get_if<HorizontalLine>(&payload.family)) {
            const double t = box(rng);
            return multiply(hl->base,
                            Point(t * hl->direction[0], t * hl->direction[1], 0.0));
          }
          return lifted_circle_point(std::get<LiftedCircle>(payload.family), u01(rng));
        } else if constexpr (std::is_same_v<T, SurfaceSpec>) {
          if (const auto* plane = std::get_if<VerticalPlane>(&payload.family)) {
            const double s = box(rng);
            const double t = box(rng);
            return Point(plane->origin[0] + s * plane->direction[0],
                         plane->origin[1] + s * plane->direction[1], t);
          }
          if (const auto* cyl = std::get_if<Cylinder>(&payload.family)) {
            const double u = u01(rng);
            const double t = box(rng);
            return Point(cyl->center[0] + cyl->radius * cos_turn(u),
                         cyl->center[1] + cyl->radius * sin_turn(u), t);
          }
          const auto& cone = std::get<LightConePatch>(payload.family);
          Point p = Point::origin(mu.n);
          p.coords.head(2 * mu.n) = sample_cone_base(cone, 2 * mu.n, rng, window);
          return p;
        } else if constexpr (std::is_same_v<T, SubgroupHaarSpec>) {
          Point p = Point::origin(mu.n);
          for (const auto& b : payload.hbasis) {
            const double c = box(rng);
            p.coords.head(2 * mu.n) += c * b;
          }
          if (payload.vertical) p.coords[2 * mu.n] = box(rng);
          return p;
        } else if constexpr (std::is_same_v<T, HeatProductSpec>) {
          const int m = payload.base_dim;
          const Eigen::VectorXd y = sample_heat_base(*payload.base, m, rng, window);
          const double t = box(rng);
          Point p = Point::origin(mu.n);
          p.coords.head(m) = y;
          p.coords[2 * mu.n] = t;
          return p;
        } else {
          static_assert(std::is_same_v<T, TransformedSpec>);
          return payload.map(sample_one(*payload.inner, rng, window));
        }
      },
      mu.payload);
}

}  // namespace detail

/// Deterministic points on the support of mu: sample i depends only on
/// (mu, seed, i).  Free parameters are drawn from [-window, window] (angles
/// from a full turn); the result is a set of support points, not a draw from
/// the measure itself.
inline std::vector<Point> sample_support(const MeasureSpec& mu, int count,
                                         std::uint64_t seed, double window = 2.0) {
  detail::require(count >= 1, "sample_support: need count >= 1");
  detail::require(window > 0.0 && std::isfinite(window),
                  "sample_support: window must be positive");
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    auto rng = substream(seed, static_cast<std::uint64_t>(i));
    out.push_back(detail::sample_one(mu, rng, window));
  }
  return out;
}

namespace detail {

inline double heat_base_residual(const MeasureSpec& base, const Eigen::VectorXd& y) {
  if (const auto* atomic = std::get_if<AtomicSpec>(&base.payload)) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& a : atomic->atoms)
      best = std::min(best, (y - a.point.coords.head(y.size())).norm());
    return best;
  }
  if (const auto* sub = std::get_if<SubgroupHaarSpec>(&base.payload)) {
    Eigen::VectorXd rest = y;
    for (const auto& b : sub->hbasis) {
      const Eigen::VectorXd bb = pad_to(b, y.size());
      rest -= bb.dot(y) * bb;
    }
    if (sub->vertical) rest[y.size() - 1] = 0.0;
    return rest.norm();
  }
  const auto& surf = std::get<SurfaceSpec>(base.payload);
  const auto& cone = std::get<LightConePatch>(surf.family);
  const double cd = cone_distance_r4(y.head(3).norm(), y[3]);
  double tail2 = 0.0;
  for (Eigen::Index i = cone.k; i < y.size(); ++i) tail2 += y[i] * y[i];
  return std::sqrt(cd * cd + tail2);
}

}  // namespace detail

/// Euclidean coordinate distance from p to the support of mu (exact up to the
/// listed parametrizations; for Transformed specs the residual is measured in
/// the inner frame after pulling p back).  Intended for "is this point on the
/// support" checks, not as a metric quantity.
inline double support_residual(const MeasureSpec& mu, const Point& p) {
  detail::require(p.n() == mu.n, "support_residual: dimension mismatch");
  return std::visit(
      [&](const auto& payload) -> double {
        using T = std::decay_t<decltype(payload)>;
        if constexpr (std::is_same_v<T, AtomicSpec>) {
          double best = std::numeric_limits<double>::infinity();
          for (const auto& a : payload.atoms)
            best = std::min(best, (p.coords - a.point.coords).norm());
          return best;
        } else if constexpr (std::is_same_v<T, CurveSpec>) {
          const Eigen::Vector2d xy(p.coords[0], p.coords[1]);
          const double x3 = p.coords[2];
          if (const auto* circ = std::get_if<CircleArcs>(&payload.family)) {
            const double radial = (xy - circ->center).norm() - circ->radius;
            double dh = std::numeric_limits<double>::infinity();
            for (double h : circ->heights) dh = std::min(dh, std::abs(x3 - h));
            return std::hypot(radial, dh);
          }
          if (const auto* lines = std::get_if<VerticalLines>(&payload.family)) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& c : lines->through) best = std::min(best, (xy - c).norm());
            return best;
          }
          if (const auto* hl = std::get_if<HorizontalLine>(&payload.family)) {
            const Point q = multiply(inverse(hl->base), p);
            const Eigen::Vector2d qxy(q.coords[0], q.coords[1]);
            const Eigen::Vector2d perp = qxy - qxy.dot(hl->direction) * hl->direction;
            return std::hypot(perp.norm(), q.coords[2]);
          }
          const auto& lc = std::get<LiftedCircle>(payload.family);
          const Eigen::Vector2d d = xy - lc.center;
          const double rho = d.norm();
          if (rho == 0.0) return std::hypot(lc.radius, x3 - lc.height0);
          const double phi = std::atan2(d[1], d[0]);  // in (-pi, pi]
          double theta = lc.orientation * phi;        // parameter angle
          if (theta < 0.0) theta += 2.0 * M_PI;       // single-turn branch [0, 2 pi)
          const Point on = detail::lifted_circle_point(lc, theta / (2.0 * M_PI));
          return std::hypot(rho - lc.radius, x3 - on.coords[2]);
        } else if constexpr (std::is_same_v<T, SurfaceSpec>) {
          const Eigen::Vector2d xy(p.coords[0], p.coords[1]);
          if (const auto* plane = std::get_if<VerticalPlane>(&payload.family)) {
            const Eigen::Vector2d normal(-plane->direction[1], plane->direction[0]);
            return std::abs((xy - plane->origin).dot(normal));
          }
          if (const auto* cyl = std::get_if<Cylinder>(&payload.family)) {
            return std::abs((xy - cyl->center).norm() - cyl->radius);
          }
          const auto& cone = std::get<LightConePatch>(payload.family);
          const double cd =
              detail::cone_distance_r4(p.coords.head(3).norm(), p.coords[3]);
          double tail2 = 0.0;
          for (int i = cone.k; i < 2 * mu.n; ++i) tail2 += p.coords[i] * p.coords[i];
          tail2 += p.coords[2 * mu.n] * p.coords[2 * mu.n];
          return std::sqrt(cd * cd + tail2);
        } else if constexpr (std::is_same_v<T, SubgroupHaarSpec>) {
          Eigen::VectorXd rest = p.coords.head(2 * mu.n);
          for (const auto& b : payload.hbasis) rest -= b.dot(rest) * b;
          const double vertical_gap = payload.vertical ? 0.0 : p.coords[2 * mu.n];
          return std::hypot(rest.norm(), vertical_gap);
        } else if constexpr (std::is_same_v<T, HeatProductSpec>) {
          const int m = payload.base_dim;
          const double base_res =
              detail::heat_base_residual(*payload.base, p.coords.head(m));
          double off2 = 0.0;
          for (int i = m; i < 2 * mu.n; ++i) off2 += p.coords[i] * p.coords[i];
          return std::sqrt(base_res * base_res + off2);
        } else {
          static_assert(std::is_same_v<T, TransformedSpec>);
          return support_residual(*payload.inner, payload.map.inverse()(p));
        }
      },
      mu.payload);
}

}  // namespace koranyi
