#include <catch2/catch_amalgamated.hpp>

#include <koranyi/measure.hpp>
#include <koranyi/measure_json.hpp>

#include <cmath>
#include <variant>
#include <vector>

using namespace koranyi;
using Catch::Matchers::WithinAbs;

namespace {

const std::vector<Atom>& atoms_of(const MeasureSpec& mu) {
  return std::get<AtomicSpec>(mu.payload).atoms;
}

bool same_coords(const Point& a, const Point& b) {
  if (a.coords.size() != b.coords.size()) return false;
  for (Eigen::Index i = 0; i < a.coords.size(); ++i)
    if (a.coords[i] != b.coords[i]) return false;
  return true;
}

}  // namespace

TEST_CASE("regular polygons have bit-exact cardinal vertices") {
  const auto square = make_polygon_counting(4);
  const auto& atoms = atoms_of(square);
  REQUIRE(atoms.size() == 4);
  REQUIRE(same_coords(atoms[0].point, Point(1.0, 0.0, 0.0)));
  REQUIRE(same_coords(atoms[1].point, Point(0.0, 1.0, 0.0)));
  REQUIRE(same_coords(atoms[2].point, Point(-1.0, 0.0, 0.0)));
  REQUIRE(same_coords(atoms[3].point, Point(0.0, -1.0, 0.0)));
  for (const auto& a : atoms) REQUIRE(a.weight == 1.0);

  // All m-gons: unit radius, equal side lengths, correct count.
  for (int m = 3; m <= 8; ++m) {
    const auto gon = make_polygon_counting(m, 0.3, 0.7);
    const auto& vs = atoms_of(gon);
    REQUIRE(vs.size() == static_cast<std::size_t>(m));
    const double side = dist_h(vs[0].point, vs[1].point);
    for (int i = 0; i < m; ++i) {
      const Eigen::Vector2d xy(vs[i].point.coords[0], vs[i].point.coords[1]);
      REQUIRE_THAT(xy.norm(), WithinAbs(1.0, 1e-15));
      REQUIRE(vs[i].point.coords[2] == 0.7);
      const double s = dist_h(vs[i].point, vs[(i + 1) % m].point);
      REQUIRE_THAT(s, WithinAbs(side, 1e-14));
    }
  }

  REQUIRE_THROWS_AS(make_polygon_counting(0), std::invalid_argument);
}

TEST_CASE("polygon pairs stack two rings at opposite heights") {
  const auto pair = make_polygon_pair(4, 0.0, M_PI / 4.0, 0.5);
  const auto& atoms = atoms_of(pair);
  REQUIRE(atoms.size() == 8);
  for (int i = 0; i < 4; ++i) REQUIRE(atoms[i].point.coords[2] == 0.5);
  for (int i = 4; i < 8; ++i) REQUIRE(atoms[i].point.coords[2] == -0.5);
  // The second ring is rotated by an eighth of a turn.
  REQUIRE_THAT(atoms[4].point.coords[0], WithinAbs(std::sqrt(0.5), 1e-15));
  REQUIRE_THAT(atoms[4].point.coords[1], WithinAbs(std::sqrt(0.5), 1e-15));
}

TEST_CASE("atomic constructor validates") {
  REQUIRE_THROWS_AS(make_atomic(1, {}), std::invalid_argument);
  REQUIRE_THROWS_AS(make_atomic(1, {{Point(1, 0, 0), 0.0}}), std::invalid_argument);
  REQUIRE_THROWS_AS(make_atomic(1, {{Point(1, 0, 0), -2.0}}), std::invalid_argument);
  REQUIRE_THROWS_AS(make_atomic(2, {{Point(1, 0, 0), 1.0}}), std::invalid_argument);
}

TEST_CASE("subgroup constructors: dimensions, exponents, validation") {
  const auto axis = make_vertical_axis(2);
  const auto& axis_spec = std::get<SubgroupHaarSpec>(axis.payload);
  REQUIRE(axis_spec.vertical);
  REQUIRE(axis_spec.hbasis.empty());
  REQUIRE(axis_spec.k() == 1);
  REQUIRE(axis_spec.k_prime() == 2);

  const auto plane = make_horizontal_subgroup(3, 2);
  const auto& plane_spec = std::get<SubgroupHaarSpec>(plane.payload);
  REQUIRE_FALSE(plane_spec.vertical);
  REQUIRE(plane_spec.k() == 2);
  REQUIRE(plane_spec.k_prime() == 2);

  // Vertical subgroup over a horizontal direction: k = 2, growth k + 1 = 3.
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(2);
  e1[0] = 1.0;
  const auto wall = make_subgroup_haar(1, true, {e1});
  const auto& wall_spec = std::get<SubgroupHaarSpec>(wall.payload);
  REQUIRE(wall_spec.k() == 2);
  REQUIRE(wall_spec.k_prime() == 3);

  // {e_1, e_{n+1}} pairs up under the symplectic form, so it cannot span a
  // horizontal subgroup.
  Eigen::VectorXd a = Eigen::VectorXd::Zero(4), b = Eigen::VectorXd::Zero(4);
  a[0] = 1.0;
  b[2] = 1.0;
  REQUIRE_THROWS_AS(make_subgroup_haar(2, false, {a, b}), std::invalid_argument);
  // ... but it is fine for a vertical subgroup, which absorbs the twist.
  REQUIRE_NOTHROW(make_subgroup_haar(2, true, {a, b}));

  // n = 1 admits no 2-dimensional horizontal subgroup at all.
  Eigen::VectorXd u = Eigen::VectorXd::Zero(2), v = Eigen::VectorXd::Zero(2);
  u[0] = 1.0;
  v[1] = 1.0;
  REQUIRE_THROWS_AS(make_subgroup_haar(1, false, {u, v}), std::invalid_argument);

  // Dependent input is rejected; scaled input is orthonormalized exactly.
  Eigen::VectorXd two_e1 = Eigen::VectorXd::Zero(4), mix = Eigen::VectorXd::Zero(4);
  two_e1[0] = 2.0;
  mix[0] = 1.0;
  mix[1] = 1.0;
  REQUIRE_THROWS_AS(make_subgroup_haar(2, false, {two_e1, two_e1}),
                    std::invalid_argument);
  const auto gs = make_subgroup_haar(2, false, {two_e1, mix});
  const auto& gs_spec = std::get<SubgroupHaarSpec>(gs.payload);
  REQUIRE(gs_spec.hbasis[0][0] == 1.0);
  REQUIRE(gs_spec.hbasis[0][1] == 0.0);
  REQUIRE(gs_spec.hbasis[1][0] == 0.0);
  REQUIRE(gs_spec.hbasis[1][1] == 1.0);

  REQUIRE_THROWS_AS(make_horizontal_subgroup(2, 3), std::invalid_argument);
}

TEST_CASE("light cone constructor bounds") {
  REQUIRE_NOTHROW(make_light_cone(4, 4));
  REQUIRE_NOTHROW(make_light_cone(6, 5));
  REQUIRE_THROWS_AS(make_light_cone(3, 3), std::invalid_argument);
  REQUIRE_THROWS_AS(make_light_cone(5, 6), std::invalid_argument);
  REQUIRE_THROWS_AS(make_light_cone(5, 3), std::invalid_argument);
}

TEST_CASE("heat products accept exactly the supported bases") {
  REQUIRE_NOTHROW(heat_product_measure(make_light_cone(4, 4), 4));
  REQUIRE_THROWS_AS(heat_product_measure(make_light_cone(4, 4), 3),
                    std::invalid_argument);

  // Euclidean line inside R^1: atoms/subgroups must not stick out of R^M.
  const auto line = make_horizontal_subgroup(1, 1);
  REQUIRE_NOTHROW(heat_product_measure(line, 1));
  Eigen::VectorXd e2 = Eigen::VectorXd::Zero(2);
  e2[1] = 1.0;
  REQUIRE_THROWS_AS(heat_product_measure(make_subgroup_haar(1, false, {e2}), 1),
                    std::invalid_argument);

  REQUIRE_NOTHROW(heat_product_measure(
      make_atomic(1, {{Point(0.5, 0.0, 0.0), 1.0}, {Point(-1.0, 0.0, 0.0), 2.0}}), 1));
  REQUIRE_THROWS_AS(heat_product_measure(make_atomic(1, {{Point(0.5, 0.1, 0.0), 1.0}}), 1),
                    std::invalid_argument);

  // A vertical base subgroup occupies the full R^{2n+1}.
  REQUIRE_NOTHROW(heat_product_measure(make_vertical_axis(1), 3));
  REQUIRE_THROWS_AS(heat_product_measure(make_vertical_axis(1), 2),
                    std::invalid_argument);

  // Curves are not Euclidean base measures.
  REQUIRE_THROWS_AS(heat_product_measure(make_circle_measure(), 3),
                    std::invalid_argument);
}

TEST_CASE("transform_measure materializes atoms and flattens compositions") {
  const auto square = make_polygon_counting(4);
  const auto shift = Similarity::translation(Point(1.0, 0.0, 0.0));
  const auto moved = transform_measure(square, shift, 3.0);
  const auto& atoms = atoms_of(moved);
  REQUIRE(atoms.size() == 4);
  // (1,0,0) * (1,0,0) = (2,0,0); (1,0,0) * (0,1,0) picks up the twist -2.
  REQUIRE(same_coords(atoms[0].point, Point(2.0, 0.0, 0.0)));
  REQUIRE(same_coords(atoms[1].point, Point(1.0, 1.0, -2.0)));
  for (const auto& a : atoms) REQUIRE(a.weight == 3.0);

  const auto circle = make_circle_measure();
  const auto once = transform_measure(circle, shift, 2.0);
  REQUIRE(std::holds_alternative<TransformedSpec>(once.payload));
  const auto twice = transform_measure(once, Similarity::dilation(1, 5.0), 7.0);
  const auto& wrapped = std::get<TransformedSpec>(twice.payload);
  REQUIRE(std::holds_alternative<CurveSpec>(wrapped.inner->payload));
  REQUIRE(wrapped.mass_scale == 14.0);
  REQUIRE(wrapped.map.scale() == 5.0);
  // delta_5 applied after translation by (1,0,0) lands the origin at (5,0,0).
  REQUIRE(same_coords(wrapped.map(Point::origin(1)), Point(5.0, 0.0, 0.0)));

  REQUIRE_THROWS_AS(transform_measure(square, Similarity::identity(2)),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(transform_measure(square, shift, 0.0), std::invalid_argument);
}

TEST_CASE("bounded_support classification") {
  REQUIRE(bounded_support(make_polygon_counting(5)));
  REQUIRE(bounded_support(make_circle_measure()));
  REQUIRE(bounded_support(make_lifted_circle({1.0, 0.0}, 1.0)));
  REQUIRE_FALSE(bounded_support(make_vertical_line({1.0, 0.0})));
  REQUIRE_FALSE(bounded_support(make_horizontal_line()));
  REQUIRE_FALSE(bounded_support(make_cylinder()));
  REQUIRE_FALSE(bounded_support(make_vertical_plane()));
  REQUIRE_FALSE(bounded_support(make_vertical_axis(1)));
  REQUIRE_FALSE(bounded_support(make_light_cone(4, 4)));
  REQUIRE_FALSE(bounded_support(heat_product_measure(make_horizontal_subgroup(1, 1), 1)));

  const auto shift = Similarity::translation(Point(1.0, 0.0, 0.0));
  REQUIRE(bounded_support(transform_measure(make_circle_measure(), shift)));
  REQUIRE_FALSE(bounded_support(transform_measure(make_cylinder(), shift)));
}

TEST_CASE("lifted circle follows the horizontal lift of its base circle") {
  const LiftedCircle lc{{1.0, 0.5}, 0.8, 0.25, 1};
  // Start point is pinned.
  const Point start = detail::lifted_circle_point(lc, 0.0);
  REQUIRE(same_coords(start, Point(1.8, 0.5, 0.25)));

  // Quarter turn of the centered-at-(1,0) unit circle, computed by hand from
  // x3(theta) = h0 - 2 R (c1 sin theta + c2 (1 - cos theta)) - 2 R^2 theta.
  const LiftedCircle simple{{1.0, 0.0}, 1.0, 0.0, 1};
  const Point quarter = detail::lifted_circle_point(simple, 0.25);
  REQUIRE(quarter.coords[0] == 1.0);
  REQUIRE(quarter.coords[1] == 1.0);
  REQUIRE_THAT(quarter.coords[2], WithinAbs(-2.0 - M_PI, 1e-14));

  // Horizontality: along the curve the gauge distance grows linearly in the
  // parameter with speed |gamma'| = 2 pi R (a vertical component would make
  // the ratio blow up like h^{-1/2}).
  for (int orientation : {1, -1}) {
    const LiftedCircle probe{{0.7, -0.3}, 1.3, 0.1, orientation};
    const double h = 1e-5;
    for (double u : {0.0, 0.17, 0.42, 0.77, 0.99}) {
      const Point a = detail::lifted_circle_point(probe, u);
      const Point b = detail::lifted_circle_point(probe, u + h);
      const double speed = dist_h(a, b) / h;
      REQUIRE_THAT(speed, WithinAbs(2.0 * M_PI * probe.radius, 1e-3));
    }
  }
}

TEST_CASE("sample_support is deterministic and lands on the support") {
  const auto shift =
      Similarity(Point(0.3, -0.2, 0.9), vertical_axis_rotation(1, 0.6), true, 1.7);
  const std::vector<MeasureSpec> specs = {
      make_polygon_counting(5, 0.2, 0.4),
      make_circle_pair(-0.3, 1.1),
      make_circle_measure(0.5, {0.4, -0.1}, 2.0),
      make_vertical_lines_through_polygon(3, 0.1),
      make_horizontal_line(Point(0.2, 0.4, -0.5), {3.0, 4.0}),
      make_lifted_circle({1.0, -0.5}, 0.75, 0.3, -1),
      make_cylinder({0.6, 0.1}, 1.4),
      make_vertical_plane({1.0, 0.0}, {0.6, 0.8}),
      make_light_cone(5, 5),
      make_vertical_axis(2),
      make_horizontal_subgroup(3, 2),
      make_subgroup_haar(1, true,
                         {(Eigen::VectorXd(2) << 0.6, 0.8).finished()}),
      heat_product_measure(make_horizontal_subgroup(2, 1), 2),
      heat_product_measure(make_light_cone(4, 4), 4),
      heat_product_measure(make_atomic(1, {{Point(0.7, 0.0, 0.0), 1.0}}), 1),
      transform_measure(make_circle_measure(), shift, 2.0),
  };

  for (const auto& mu : specs) {
    const auto pts = sample_support(mu, 48, 20260814);
    REQUIRE(pts.size() == 48);
    for (const auto& p : pts) {
      REQUIRE(p.n() == mu.n);
      REQUIRE(support_residual(mu, p) < 1e-9);
    }
    // Same seed reproduces bitwise; a different seed moves the points.
    const auto again = sample_support(mu, 48, 20260814);
    bool identical = true;
    for (std::size_t i = 0; i < pts.size(); ++i)
      identical = identical && same_coords(pts[i], again[i]);
    REQUIRE(identical);
  }

  // Point count spot checks: atoms cycle through the support set.
  const auto square_pts = sample_support(make_polygon_counting(4), 64, 7);
  bool saw_all[4] = {false, false, false, false};
  for (const auto& p : square_pts) {
    if (p.coords[0] == 1.0) saw_all[0] = true;
    if (p.coords[1] == 1.0) saw_all[1] = true;
    if (p.coords[0] == -1.0) saw_all[2] = true;
    if (p.coords[1] == -1.0) saw_all[3] = true;
  }
  REQUIRE((saw_all[0] && saw_all[1] && saw_all[2] && saw_all[3]));

  REQUIRE_THROWS_AS(sample_support(make_circle_measure(), 0, 1), std::invalid_argument);
  REQUIRE_THROWS_AS(sample_support(make_circle_measure(), 4, 1, -1.0),
                    std::invalid_argument);
}

TEST_CASE("support_residual measures off-support displacement") {
  const auto circle = make_circle_measure();  // unit circle at height 0
  REQUIRE_THAT(support_residual(circle, Point(1.0, 0.0, 0.3)), WithinAbs(0.3, 1e-15));
  REQUIRE_THAT(support_residual(circle, Point(2.0, 0.0, 0.0)), WithinAbs(1.0, 1e-15));

  const auto axis = make_vertical_axis(1);
  REQUIRE_THAT(support_residual(axis, Point(0.6, 0.8, 5.0)), WithinAbs(1.0, 1e-15));

  const auto plane = make_vertical_plane();  // x1 = 0
  REQUIRE_THAT(support_residual(plane, Point(0.7, 3.0, -2.0)), WithinAbs(0.7, 1e-15));

  const auto cone = make_light_cone(4, 4);
  Point on = Point::origin(4);
  on.coords[0] = 3.0;
  on.coords[3] = -3.0;
  REQUIRE_THAT(support_residual(cone, on), WithinAbs(0.0, 1e-15));
  Point off = on;
  off.coords[8] = 2.0;  // dead horizontal slot
  REQUIRE_THAT(support_residual(cone, off), WithinAbs(2.0, 1e-15));

  REQUIRE_THROWS_AS(support_residual(circle, Point::origin(2)), std::invalid_argument);
}

TEST_CASE("JSON round trips are byte identical across all kinds") {
  const auto shift =
      Similarity(Point(0.3, -0.2, 0.9), vertical_axis_rotation(1, 0.6), true, 1.7);
  const std::vector<MeasureSpec> specs = {
      make_polygon_counting(6, 0.25, -0.4, 2.0),
      make_circle_pair(-0.3, 1.1, 0.5),
      make_vertical_lines_through_polygon(5, 0.3),
      make_horizontal_line(Point(0.2, 0.4, -0.5), {3.0, 4.0}, 2.0),
      make_lifted_circle({1.0, -0.5}, 0.75, 0.3, -1),
      make_cylinder({0.6, 0.1}, 1.4, 0.25),
      make_vertical_plane({1.0, 0.0}, {0.6, 0.8}),
      make_light_cone(6, 5, 3.0),
      make_vertical_axis(2),
      make_horizontal_subgroup(3, 2),
      heat_product_measure(make_light_cone(4, 4), 4),
      heat_product_measure(make_atomic(1, {{Point(0.7, 0.0, 0.0), 1.5}}), 1),
      transform_measure(make_circle_measure(), shift, 2.0),
      transform_measure(transform_measure(make_cylinder(), shift), shift.inverse()),
  };

  for (const auto& mu : specs) {
    const std::string text = measure_to_string(mu);
    const MeasureSpec back = parse_measure(text);
    REQUIRE(back.n == mu.n);
    REQUIRE(back.payload.index() == mu.payload.index());
    REQUIRE(measure_to_string(back) == text);

    // Parsing is also stable for compact output.
    const std::string compact = measure_to_json(mu).dump();
    REQUIRE(measure_to_json(parse_measure(compact)).dump() == compact);
  }
}

TEST_CASE("parsed specs behave identically to their originals") {
  const auto mu = transform_measure(
      make_circle_measure(0.5, {0.4, -0.1}, 2.0),
      Similarity(Point(0.3, -0.2, 0.9), vertical_axis_rotation(1, 0.6), true, 1.7), 2.0);
  const auto back = parse_measure(measure_to_string(mu));
  const auto a = sample_support(mu, 32, 99);
  const auto b = sample_support(back, 32, 99);
  for (std::size_t i = 0; i < a.size(); ++i) REQUIRE(same_coords(a[i], b[i]));
}

TEST_CASE("malformed specs are rejected with spec_error") {
  const char* bad[] = {
      "not json at all",
      "[1,2,3]",
      R"({"schema":1,"n":1})",                                  // no kind
      R"({"schema":2,"kind":"atomic","n":1,"atoms":[]})",       // bad schema
      R"({"schema":1,"kind":"blob","n":1})",                    // unknown kind
      R"({"schema":1,"kind":"atomic","n":1,"atoms":[]})",       // empty atoms
      R"({"schema":1,"kind":"atomic","n":1,"atoms":[{"point":[1,0,0],"weight":0}]})",
      R"({"schema":1,"kind":"atomic","n":2,"atoms":[{"point":[1,0,0],"weight":1}]})",
      R"({"schema":1,"kind":"atomic","n":1,"atoms":[{"point":[1,0,0],"weight":1,"x":0}]})",
      R"({"schema":1,"kind":"curve","n":2,"curve":{"family":"circle-arcs","center":[0,0],"radius":1,"heights":[0],"density":1}})",
      R"({"schema":1,"kind":"curve","n":1,"curve":{"family":"circle-arcs","center":[0,0],"radius":-1,"heights":[0],"density":1}})",
      R"({"schema":1,"kind":"curve","n":1,"curve":{"family":"horizontal-line","base":[0,0,0],"direction":[3,4],"density":1}})",
      R"({"schema":1,"kind":"surface","n":1,"surface":{"family":"light-cone-patch","k":4,"density":1}})",
      R"({"schema":1,"kind":"subgroup-haar","n":1,"vertical":false,"hbasis":[]})",
      R"({"schema":1,"kind":"subgroup-haar","n":1,"vertical":false,"hbasis":[[2,0]]})",
      R"({"schema":1,"kind":"subgroup-haar","n":2,"vertical":false,"hbasis":[[1,0,0,0],[0,0,1,0]]})",
      R"({"schema":1,"kind":"heat-product","n":3,"base":{"schema":1,"kind":"curve","n":1,"curve":{"family":"circle-arcs","center":[0,0],"radius":1,"heights":[0],"density":1}},"base_dim":3})",
      R"({"schema":1,"kind":"transformed","n":1,"inner":{"schema":1,"kind":"atomic","n":1,"atoms":[{"point":[1,0,0],"weight":1}]},"map":{"translation":[0,0,0],"rotation":[[1,0],[0,-1]],"reflect":false,"scale":1},"mass_scale":1})",
  };
  for (const char* text : bad) {
    INFO(text);
    REQUIRE_THROWS_AS(parse_measure(text), spec_error);
  }

  // A well-formed minimal spec parses.
  REQUIRE_NOTHROW(parse_measure(
      R"({"schema":1,"kind":"atomic","n":1,"atoms":[{"point":[1,0,0],"weight":1}]})"));
  // Orthonormal but non-isotropic pairs are accepted once vertical is set.
  REQUIRE_NOTHROW(parse_measure(
      R"({"schema":1,"kind":"subgroup-haar","n":2,"vertical":true,"hbasis":[[1,0,0,0],[0,0,1,0]]})"));
}
