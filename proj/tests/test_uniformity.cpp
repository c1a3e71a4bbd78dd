#include <catch2/catch_amalgamated.hpp>

#include <koranyi/uniformity.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <utility>
#include <vector>

using namespace koranyi;

namespace {

// Independent oracle for "every support point sees the same ball masses" on
// counting measures: aggregate atom weight by distance from each atom and
// compare the resulting (distance, weight) rows across atoms.
std::vector<std::pair<double, double>> weight_by_distance(const std::vector<Atom>& atoms,
                                                          const Point& from) {
  std::vector<std::pair<double, double>> rows;
  rows.reserve(atoms.size());
  for (const auto& a : atoms) rows.emplace_back(dist_h(from, a.point), a.weight);
  std::sort(rows.begin(), rows.end());
  std::vector<std::pair<double, double>> merged;
  for (const auto& row : rows) {
    if (!merged.empty() && row.first - merged.back().first <= 1e-9 * (1.0 + row.first))
      merged.back().second += row.second;
    else
      merged.push_back(row);
  }
  return merged;
}

bool multiset_uniform(const MeasureSpec& mu) {
  const auto& atoms = std::get<AtomicSpec>(mu.payload).atoms;
  const auto ref = weight_by_distance(atoms, atoms[0].point);
  for (std::size_t i = 1; i < atoms.size(); ++i) {
    const auto row = weight_by_distance(atoms, atoms[i].point);
    if (row.size() != ref.size()) return false;
    for (std::size_t j = 0; j < ref.size(); ++j) {
      if (std::abs(row[j].first - ref[j].first) > 1e-9 * (1.0 + ref[j].first))
        return false;
      if (std::abs(row[j].second - ref[j].second) >
          1e-9 * (1.0 + std::abs(ref[j].second)))
        return false;
    }
  }
  return true;
}

double beta_fn(double a, double b) {
  return std::tgamma(a) * std::tgamma(b) / std::tgamma(a + b);
}

double rel_diff(double a, double b) { return std::abs(a - b) / (1.0 + std::abs(b)); }

}  // namespace

TEST_CASE("verdict names") {
  CHECK(std::string(verdict_name(Verdict::UniformlyDistributed)) ==
        "uniformly-distributed");
  CHECK(std::string(verdict_name(Verdict::SUniform)) == "s-uniform");
  CHECK(std::string(verdict_name(Verdict::Neither)) == "neither");
  CHECK(std::string(verdict_name(Verdict::Inconclusive)) == "inconclusive");
}

TEST_CASE("regular polygons are uniformly distributed with zero deviation") {
  for (int m = 3; m <= 8; ++m) {
    const auto gon = make_polygon_counting(m);
    const auto rep = check_uniformly_distributed(gon);
    INFO("m = " << m);
    REQUIRE(rep.verdict == Verdict::UniformlyDistributed);
    CHECK(rep.max_rel_deviation == 0.0);
    CHECK(rep.error_budget == 0.0);
    CHECK(rep.points.size() == static_cast<std::size_t>(m));
    // probe radii include every pairwise distance of the configuration
    for (std::size_t i = 1; i < rep.points.size(); ++i) {
      const double d = dist_h(rep.points[0], rep.points[i]);
      bool found = false;
      for (double r : rep.radii) found = found || std::abs(r - d) <= 1e-9;
      CHECK(found);
    }
  }
  const auto heavy = make_polygon_counting(5, 0.3, -0.4, 2.5);
  CHECK(check_uniformly_distributed(heavy).verdict == Verdict::UniformlyDistributed);
}

TEST_CASE("a small vertex perturbation flips the verdict") {
  auto square = make_polygon_counting(4);
  std::get<AtomicSpec>(square.payload).atoms[0].point.coords[0] += 1e-3;
  const auto rep = check_uniformly_distributed(square);
  REQUIRE(rep.verdict == Verdict::Neither);
  CHECK(rep.max_rel_deviation > 0.1);
}

TEST_CASE("scan verdict matches the distance-multiset oracle on random atoms") {
  auto rng = substream(424242, 0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_real_distribution<double> box(-1.0, 1.0);

  int positives = 0, negatives = 0;
  for (int i = 0; i < 200; ++i) {
    const int type = i % 4;
    const int m = 3 + (i / 4) % 6;
    const double phase = 2.0 * M_PI * u01(rng);
    const double height = box(rng);
    const double weight = std::exp(box(rng));
    MeasureSpec mu = make_polygon_counting(m, phase, height, weight);

    if (type == 0) {
      // exact-symmetry positive, pushed through a random similarity
      const Similarity s(Point(box(rng), box(rng), box(rng)),
                         vertical_axis_rotation(1, 2.0 * M_PI * u01(rng)), i % 8 == 0,
                         0.5 + 1.5 * u01(rng));
      mu = transform_measure(mu, s, 1.0);
    } else if (type == 1) {
      // nudge one vertex off the symmetric configuration
      auto& atom = std::get<AtomicSpec>(mu.payload).atoms[0];
      const double delta = 0.01 + 0.09 * u01(rng);
      const double dir = 2.0 * M_PI * u01(rng);
      atom.point.coords[0] += delta * std::cos(dir);
      atom.point.coords[1] += delta * std::sin(dir);
      atom.point.coords[2] += delta * box(rng);
    } else if (type == 2) {
      // generic cloud
      std::vector<Atom> atoms;
      const int count = 3 + static_cast<int>(rng() % 6);
      for (int j = 0; j < count; ++j)
        atoms.push_back({Point(box(rng), box(rng), box(rng)), std::exp(box(rng))});
      mu = make_atomic(1, std::move(atoms));
    } else {
      // polygon plus its center: multisets from center and vertex differ
      std::get<AtomicSpec>(mu.payload).atoms.push_back(
          {Point(0.0, 0.0, height), weight});
    }

    const bool oracle = multiset_uniform(mu);
    const auto rep = uniformity_scan(mu);
    INFO("config " << i << " type " << type);
    REQUIRE((rep.verdict == Verdict::UniformlyDistributed) == oracle);
    CHECK(oracle == (type == 0));
    (oracle ? positives : negatives)++;
  }
  CHECK(positives == 50);
  CHECK(negatives == 150);
}

TEST_CASE("unevenly spaced collinear atoms are not uniformly distributed") {
  const auto mu = make_atomic(1, {{Point(0.0, 0.0, 0.0), 1.0},
                                  {Point(1.0, 0.0, 0.0), 1.0},
                                  {Point(3.0, 0.0, 0.0), 1.0}});
  CHECK(check_uniformly_distributed(mu).verdict == Verdict::Neither);
}

TEST_CASE("vertical axis is power-uniform with exponent 2 and constant 2") {
  const auto rep = check_s_uniform(make_vertical_axis(1));
  REQUIRE(rep.verdict == Verdict::SUniform);
  CHECK(rep.max_rel_deviation == 0.0);
  CHECK(std::abs(rep.fitted_exponent - 2.0) < 1e-9);
  CHECK(std::abs(rep.fitted_constant - 2.0) < 1e-9);
  CHECK(rep.fit_residual < 1e-9);

  // same support expressed as a curve, with a density: constant scales
  const auto weighted = check_s_uniform(make_vertical_line({0.0, 0.0}, 2.5));
  REQUIRE(weighted.verdict == Verdict::SUniform);
  CHECK(std::abs(weighted.fitted_exponent - 2.0) < 1e-9);
  CHECK(std::abs(weighted.fitted_constant - 5.0) < 1e-9);
}

TEST_CASE("horizontal subgroups are power-uniform with exponent k") {
  const double omega[4] = {0.0, 2.0, M_PI, 4.0 * M_PI / 3.0};
  for (int k = 1; k <= 3; ++k) {
    const auto rep = check_s_uniform(make_horizontal_subgroup(3, k));
    INFO("k = " << k);
    REQUIRE(rep.verdict == Verdict::SUniform);
    CHECK(rep.max_rel_deviation == 0.0);
    CHECK(std::abs(rep.fitted_exponent - k) < 1e-9);
    CHECK(rel_diff(rep.fitted_constant, omega[k]) < 1e-9);
  }
}

TEST_CASE("vertical subgroups are power-uniform with exponent k + 1") {
  // wall {(w, 0, t)}: mass B(1/4, 3/2) r^3
  const auto wall = check_s_uniform(
      make_subgroup_haar(1, true, {Eigen::VectorXd::Unit(2, 0)}));
  REQUIRE(wall.verdict == Verdict::SUniform);
  CHECK(std::abs(wall.fitted_exponent - 3.0) < 1e-6);
  CHECK(rel_diff(wall.fitted_constant, beta_fn(0.25, 1.5)) < 1e-6);

  // {(w1, w2, 0, 0, t)} in the 5-dimensional group: mass (pi^2 / 2) r^4
  const auto slab = check_s_uniform(make_subgroup_haar(
      2, true, {Eigen::VectorXd::Unit(4, 0), Eigen::VectorXd::Unit(4, 1)}));
  REQUIRE(slab.verdict == Verdict::SUniform);
  CHECK(std::abs(slab.fitted_exponent - 4.0) < 1e-6);
  CHECK(rel_diff(slab.fitted_constant, M_PI * M_PI / 2.0) < 1e-6);
}

TEST_CASE("circle is uniformly distributed but not a power law on wide grids") {
  const auto circle = make_circle_measure();
  const auto wide = check_s_uniform(circle);
  REQUIRE(wide.verdict == Verdict::UniformlyDistributed);  // saturation kills the fit
  CHECK(wide.max_rel_deviation < 1e-3 + wide.error_budget);
  CHECK(wide.fit_residual > 0.01);

  UniformityOptions small;
  small.radii = log_radii(1.0 / 64.0, 1.0 / 8.0, 7);
  const auto local = uniformity_scan(circle, small);
  REQUIRE(local.verdict == Verdict::UniformlyDistributed);
  CHECK(std::abs(local.fitted_exponent - 2.0) < 0.05);
}

TEST_CASE("cylinder is uniformly distributed with local exponent 3") {
  const auto cyl = make_cylinder();
  const auto wide = check_uniformly_distributed(cyl);
  REQUIRE(wide.verdict == Verdict::UniformlyDistributed);

  UniformityOptions small;
  small.radii = log_radii(1.0 / 64.0, 1.0 / 8.0, 7);
  const auto local = uniformity_scan(cyl, small);
  REQUIRE(local.verdict == Verdict::UniformlyDistributed);
  CHECK(std::abs(local.fitted_exponent - 3.0) < 0.05);
}

TEST_CASE("vertical lines through a square: uniformly distributed, no power law") {
  const auto rep = check_s_uniform(make_vertical_lines_through_polygon(4));
  REQUIRE(rep.verdict == Verdict::UniformlyDistributed);
  CHECK(rep.max_rel_deviation == 0.0);  // identical line-distance multisets
  CHECK(rep.fit_residual > 1e-3);       // extra lines join at r = sqrt(2) and 2
}

TEST_CASE("unattainable ball tolerances yield an inconclusive verdict") {
  UniformityOptions opts;
  opts.num_points = 2;
  opts.radii = {1.0, 2.0};
  opts.ball.tol = 1e-16;  // below what adaptive panels can certify
  const auto rep = uniformity_scan(make_cylinder(), opts);
  CHECK(rep.verdict == Verdict::Inconclusive);
}

TEST_CASE("reports are deterministic for fixed options") {
  const auto a = uniformity_scan(make_cylinder());
  const auto b = uniformity_scan(make_cylinder());
  REQUIRE(a.values.size() == b.values.size());
  for (std::size_t p = 0; p < a.values.size(); ++p)
    for (std::size_t j = 0; j < a.values[p].size(); ++j) {
      REQUIRE(a.values[p][j].value == b.values[p][j].value);
      REQUIRE(a.values[p][j].abs_error == b.values[p][j].abs_error);
    }
  CHECK(a.verdict == b.verdict);
  CHECK(a.fitted_exponent == b.fitted_exponent);
}

TEST_CASE("verdicts survive isometries; dilations rescale the constant") {
  const auto circle = make_circle_measure();
  const Similarity iso(Point(0.4, -0.1, 0.2), vertical_axis_rotation(1, 1.1), false,
                       1.0);
  const auto moved = transform_measure(circle, iso, 1.0);
  const auto before = uniformity_scan(circle);
  const auto after = uniformity_scan(moved);
  CHECK(before.verdict == after.verdict);
  CHECK(std::abs(before.fitted_exponent - after.fitted_exponent) < 1e-9);
  CHECK(rel_diff(before.fitted_constant, after.fitted_constant) < 1e-9);

  // nu = (delta_2)# mu on the vertical axis: nu(B(0, r)) = 2 (r/2)^2 = r^2/2
  const Similarity doubling(Point(0.0, 0.0, 0.0), Eigen::MatrixXd::Identity(2, 2),
                            false, 2.0);
  const auto blown = check_s_uniform(transform_measure(make_vertical_axis(1), doubling));
  REQUIRE(blown.verdict == Verdict::SUniform);
  CHECK(std::abs(blown.fitted_exponent - 2.0) < 1e-9);
  CHECK(std::abs(blown.fitted_constant - 0.5) < 1e-9);
}

TEST_CASE("density ratios settle at the uniform constant on the vertical axis") {
  const auto axis = make_vertical_axis(1);
  const Point p(0.0, 0.0, 0.3);
  std::vector<double> radii;
  for (int i = 1; i <= 10; ++i) radii.push_back(std::pow(2.0, -i));

  const auto at2 = density(axis, p, 2.0, radii);
  REQUIRE(at2.converged);
  CHECK(std::abs(at2.upper - 2.0) < 1e-12);
  CHECK(std::abs(at2.lower - 2.0) < 1e-12);
  CHECK(at2.trend == "finite");
  CHECK(at2.radii_used == radii);

  CHECK(density(axis, p, 1.5, radii).trend == "to-zero");
  CHECK(density(axis, p, 2.5, radii).trend == "to-infinity");
}

TEST_CASE("circle has unit 2-density at its points") {
  const auto circle = make_circle_measure();
  std::vector<double> radii;
  for (int i = 2; i <= 8; ++i) radii.push_back(std::pow(2.0, -i));
  const auto est = density(circle, Point(1.0, 0.0, 0.0), 2.0, radii);
  REQUIRE(est.converged);
  CHECK(std::abs(est.upper - 1.0) < 1e-3);
  CHECK(std::abs(est.lower - 1.0) < 1e-3);
  CHECK(est.trend == "finite");
}

TEST_CASE("density input validation") {
  const auto axis = make_vertical_axis(1);
  const Point p(0.0, 0.0, 0.0);
  CHECK_THROWS_AS(density(axis, p, 2.0, {0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(density(axis, p, 2.0, {0.5, 1e-5}), std::invalid_argument);
  CHECK_THROWS_AS(density(axis, p, 2.0, {0.5}), std::invalid_argument);
  const auto nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(density(axis, p, nan, {0.5, 0.25}), std::invalid_argument);
  CHECK_THROWS_AS(density(make_circle_measure(), Point(0.5, 0.0, 0.0), 2.0, {0.5, 0.25}),
                  std::invalid_argument);  // off-support base point
}

TEST_CASE("blow-ups rescale ball masses exactly") {
  const auto axis = make_vertical_axis(1);
  const Point x0(0.0, 0.0, 0.7);
  auto rng = substream(77, 0);
  std::uniform_real_distribution<double> uk(-2.0, 3.0), un(0.1, 5.0);

  for (int i = 0; i < 50; ++i) {
    const double k = std::pow(2.0, uk(rng));
    const double big_n = un(rng);
    const auto nu = blowup(axis, x0, k, 2.0);
    const double lhs = ball_measure(nu, Point::origin(1), big_n).value;
    const double rhs = k * k * ball_measure(axis, x0, big_n / k).value;
    INFO("k = " << k << " N = " << big_n);
    REQUIRE(rel_diff(lhs, rhs) < 1e-12);
    REQUIRE(rel_diff(lhs, 2.0 * big_n * big_n) < 1e-9);
  }

  const auto circle = make_circle_measure();
  const Point c0(1.0, 0.0, 0.0);
  for (int i = 0; i < 50; ++i) {
    const double k = std::pow(2.0, uk(rng));
    const double big_n = 0.2 + 2.0 * un(rng) / 5.0;
    const auto nu = blowup(circle, c0, k, 2.0);
    const double lhs = ball_measure(nu, Point::origin(1), big_n).value;
    const double rhs = k * k * ball_measure(circle, c0, big_n / k).value;
    REQUIRE(rel_diff(lhs, rhs) < 1e-9);
  }
}

TEST_CASE("axis blow-up profiles are independent of the zoom factor") {
  const auto axis = make_vertical_axis(1);
  const Point x0(0.0, 0.0, 0.7);
  const auto radii = default_radii();
  for (double k : {0.5, 1.0, 3.0, 10.0}) {
    const auto profile = distance_profile(blowup(axis, x0, k, 2.0), Point::origin(1),
                                          radii);
    for (std::size_t j = 0; j < radii.size(); ++j)
      REQUIRE(rel_diff(profile[j].value, 2.0 * radii[j] * radii[j]) < 1e-9);
  }
  CHECK_THROWS_AS(blowup(axis, Point(1.0, 0.0, 0.0), 2.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(blowup(axis, x0, 0.0, 2.0), std::invalid_argument);
}

TEST_CASE("tangent transforms map balls onto unit-scale balls") {
  const auto circle = make_circle_measure();
  const Point a(0.3, -0.4, 0.2);
  const auto nu = tangent_transform(circle, a, 0.25, 3.0);
  const auto& tr = std::get<TransformedSpec>(nu.payload);

  auto rng = substream(5, 1);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 1000; ++i) {
    const Point p(u(rng), u(rng), u(rng));
    const double lhs = dist_h(Point::origin(1), tr.map(p));
    const double rhs = dist_h(a, p) / 0.25;
    REQUIRE(std::abs(lhs - rhs) <= 1e-12 * (1.0 + rhs));
  }
  for (double r : {0.8, 1.6}) {
    const double lhs = ball_measure(nu, Point::origin(1), r).value;
    const double rhs = 3.0 * ball_measure(circle, a, 0.25 * r).value;
    REQUIRE(rel_diff(lhs, rhs) < 1e-9);
  }

  const auto id = tangent_transform(circle, Point::origin(1), 1.0, 1.0);
  const Point q(0.7, -0.3, 0.4);
  const Point mapped = std::get<TransformedSpec>(id.payload).map(q);
  CHECK((mapped.coords - q.coords).norm() < 1e-15);

  CHECK_THROWS_AS(tangent_transform(circle, a, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(tangent_transform(circle, a, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("support functional vanishes on equivalent points, dips off support") {
  // single atom: closed form w (exp(-s d^4) - 1) with x0 at the atom
  const Point z0(0.2, -0.1, 0.3);
  const auto one = make_atomic(1, {{z0, 2.0}});
  const Point x(1.0, 1.0, 1.0);
  const double q1 = z0.coords[0] - x.coords[0];
  const double q2 = z0.coords[1] - x.coords[1];
  const double z3 = z0.coords[2] - x.coords[2] +
                    2.0 * (x.coords[0] * z0.coords[1] - x.coords[1] * z0.coords[0]);
  const double d4o = (q1 * q1 + q2 * q2) * (q1 * q1 + q2 * q2) + z3 * z3;
  for (double s : {0.5, 2.0}) {
    const double expect = 2.0 * (std::exp(-s * d4o) - 1.0);
    CHECK(std::abs(support_functional(one, x, z0, s) - expect) < 1e-14);
  }

  const auto square = make_polygon_counting(4);
  const auto& atoms = std::get<AtomicSpec>(square.payload).atoms;
  for (double s : {0.5, 1.0, 2.0, 4.0})
    for (const auto& atom : atoms)
      CHECK(std::abs(support_functional(square, atom.point, atoms[0].point, s)) <
            1e-10);

  // a point at distance 0.3 from the support must show a clear dip
  double dip = 0.0;
  for (double s = 1.0; s <= 64.0; s *= 2.0)
    dip = std::min(dip, support_functional(square, Point(1.3, 0.0, 0.0),
                                           atoms[0].point, s));
  CHECK(dip < -1e-3);

  // rotational symmetry of the circle
  const auto circle = make_circle_measure();
  const Point on1(std::cos(1.0), std::sin(1.0), 0.0);
  const Point on2(1.0, 0.0, 0.0);
  CHECK(std::abs(support_functional(circle, on1, on2, 3.0)) < 1e-8);

  CHECK_THROWS_AS(support_functional(make_vertical_axis(1), x, Point(0.0, 0.0, 0.0), 1.0),
                  std::invalid_argument);  // unbounded support
  CHECK_THROWS_AS(support_functional(square, x, Point(0.5, 0.0, 0.0), 1.0),
                  std::invalid_argument);  // base point off support
  CHECK_THROWS_AS(support_functional(square, x, atoms[0].point, -1.0),
                  std::invalid_argument);
}

TEST_CASE("support functional intertwines with similarities") {
  const auto square = make_polygon_counting(4);
  const double scale = 1.4;
  const Similarity s(Point(0.3, -0.2, 0.5), vertical_axis_rotation(1, 0.6), false,
                     scale);
  const auto nu = transform_measure(square, s, 1.7);
  const Point x(0.2, 0.1, -0.3);
  const Point x0 = std::get<AtomicSpec>(square.payload).atoms[0].point;
  const double s4 = scale * scale * scale * scale;
  for (double t : {0.7, 2.0}) {
    const double lhs = support_functional(nu, s(x), s(x0), t);
    const double rhs = 1.7 * support_functional(square, x, x0, t * s4);
    REQUIRE(rel_diff(lhs, rhs) < 1e-9);
  }
}

TEST_CASE("support functional agrees with its ball-mass layer-cake form") {
  const auto circle = make_circle_measure();
  const Point x(0.5, 0.0, 0.0), x0(1.0, 0.0, 0.0);
  const double s = 2.0;
  const double direct = support_functional(circle, x, x0, s, 1e-10);

  BallOptions bopts;
  bopts.scan_points = 512;
  const auto f = [&](double t) {
    const double bx = ball_measure(circle, x, t, bopts).value;
    const double b0 = ball_measure(circle, x0, t, bopts).value;
    const double t4 = t * t * t * t;
    return 4.0 * s * t * t * t * std::exp(-s * t4) * (bx - b0);
  };
  // both supports lie inside B(x, 3) and B(x0, 3), so the tails cancel; the
  // integrand is O(t^3) near zero, so skipping [0, 1e-6] is far below tol
  const double layered = integrate_adaptive(f, 1e-6, 3.0, 1e-7).value;
  CHECK(std::abs(direct - layered) < 1e-5);
}

TEST_CASE("moment polynomials vanish on vertices and expand the functional") {
  const Point z0(0.2, -0.1, 0.3);
  const auto one = make_atomic(1, {{z0, 2.0}});
  const Point x(1.0, 1.0, 1.0);
  const double d4o = dist4(x, z0);
  for (int j = 1; j <= 4; ++j) {
    double pw = 1.0;
    for (int i = 0; i < j; ++i) pw *= d4o;
    CHECK(rel_diff(moment_polynomial(one, j, x, z0), 2.0 * pw) < 1e-12);
  }

  const auto square = make_polygon_counting(4);
  const auto& atoms = std::get<AtomicSpec>(square.payload).atoms;
  for (int j = 1; j <= 5; ++j)
    for (const auto& atom : atoms)
      CHECK(std::abs(moment_polynomial(square, j, atom.point, atoms[0].point)) < 1e-10);

  // center vs vertex: sum of fourth powers is 4 from the center, 32 from a
  // vertex (0 + 8 + 8 + 16), so P_1 = -28
  CHECK(std::abs(moment_polynomial(square, 1, Point(0.0, 0.0, 0.0), atoms[0].point) +
                 28.0) < 1e-10);

  CHECK_THROWS_AS(moment_polynomial(square, 0, x, atoms[0].point),
                  std::invalid_argument);
  CHECK_THROWS_AS(moment_polynomial(make_vertical_axis(1), 1, x, Point(0.0, 0.0, 0.0)),
                  std::invalid_argument);
}

TEST_CASE("moment series sums to the support functional at small scale") {
  // shrink the square so the largest pairwise d^4 is 1 and the series
  // converges quickly
  const auto square = make_polygon_counting(4);
  const Similarity shrink(Point(0.0, 0.0, 0.0), Eigen::MatrixXd::Identity(2, 2), false,
                          0.5);
  const auto half = transform_measure(square, shrink);
  const Point x(0.0, 0.0, 0.0);  // image of the center
  const Point x0 = shrink(std::get<AtomicSpec>(square.payload).atoms[0].point);

  for (double s : {0.25, 1.0}) {
    double series = 0.0, factorial = 1.0, sign_s = 1.0;
    for (int j = 1; j <= 40; ++j) {
      factorial *= j;
      sign_s *= -s;
      series += sign_s / factorial * moment_polynomial(half, j, x, x0);
    }
    const double direct = support_functional(half, x, x0, s);
    INFO("s = " << s);
    REQUIRE(std::abs(series - direct) < 1e-10);
  }
}

TEST_CASE("distance profiles are monotone with exact atomic jumps") {
  const auto square = make_polygon_counting(4);
  const Point v = std::get<AtomicSpec>(square.payload).atoms[0].point;
  const auto profile = distance_profile(square, v, {0.5, 1.7, 2.5});
  REQUIRE(profile.size() == 3);
  CHECK(profile[0].value == 1.0);  // just the vertex itself
  CHECK(profile[1].value == 3.0);  // both neighbours at 8^{1/4} ~ 1.68
  CHECK(profile[2].value == 4.0);  // opposite vertex at distance 2
  CHECK_THROWS_AS(distance_profile(square, v, {1.0, 0.5}), std::invalid_argument);
}

TEST_CASE("uniformity input validation") {
  const auto axis = make_vertical_axis(1);
  UniformityOptions opts;
  opts.num_points = 1;
  CHECK_THROWS_AS(uniformity_scan(axis, opts), std::invalid_argument);

  opts.num_points = 4;
  opts.radii = {1.0};
  CHECK_THROWS_AS(uniformity_scan(axis, opts), std::invalid_argument);
  opts.radii = {1.0, 0.5};
  CHECK_THROWS_AS(uniformity_scan(axis, opts), std::invalid_argument);
  opts.radii = {-1.0, 1.0};
  CHECK_THROWS_AS(uniformity_scan(axis, opts), std::invalid_argument);

  opts.radii = {0.1, 1.0};  // only one decade
  CHECK_THROWS_AS(check_s_uniform(axis, opts), std::invalid_argument);
}
