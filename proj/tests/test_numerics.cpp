#include <catch2/catch_amalgamated.hpp>

#include <koranyi/numerics.hpp>

#include <cmath>
#include <set>

using namespace koranyi;

TEST_CASE("substreams are deterministic and distinct") {
  auto a1 = substream(42, 7);
  auto a2 = substream(42, 7);
  auto b = substream(42, 8);
  auto c = substream(43, 7);
  std::set<std::uint64_t> firsts;
  for (int i = 0; i < 16; ++i) {
    const auto va = a1();
    REQUIRE(va == a2());
    firsts.insert(va);
    firsts.insert(b());
    firsts.insert(c());
  }
  REQUIRE(firsts.size() == 48);  // no accidental collisions across streams
}

TEST_CASE("turn trig is exact on quarter turns") {
  REQUIRE(cos_turn(0.0) == 1.0);
  REQUIRE(sin_turn(0.0) == 0.0);
  REQUIRE(cos_turn(0.25) == 0.0);
  REQUIRE(sin_turn(0.25) == 1.0);
  REQUIRE(cos_turn(0.5) == -1.0);
  REQUIRE(sin_turn(0.5) == 0.0);
  REQUIRE(cos_turn(0.75) == 0.0);
  REQUIRE(sin_turn(0.75) == -1.0);
  REQUIRE(cos_turn(1.0) == 1.0);
  // agreement with std trig away from the lattice
  for (double t : {0.1, 0.37, 0.61, 0.93, 2.13, -0.4}) {
    REQUIRE_THAT(cos_turn(t), Catch::Matchers::WithinAbs(std::cos(2 * M_PI * t), 1e-15));
    REQUIRE_THAT(sin_turn(t), Catch::Matchers::WithinAbs(std::sin(2 * M_PI * t), 1e-15));
  }
}

TEST_CASE("adaptive quadrature hits analytic integrals") {
  auto poly = integrate_adaptive([](double x) { return x * x; }, 0.0, 1.0, 1e-12);
  REQUIRE(poly.converged);
  REQUIRE_THAT(poly.value, Catch::Matchers::WithinAbs(1.0 / 3.0, 1e-12));

  auto osc = integrate_adaptive([](double x) { return std::sin(x); }, 0.0, M_PI, 1e-12);
  REQUIRE_THAT(osc.value, Catch::Matchers::WithinAbs(2.0, 1e-10));

  // sqrt endpoint behaviour, the shape every ball section integral has
  auto disk = integrate_adaptive([](double x) { return std::sqrt(std::max(0.0, 1.0 - x * x)); },
                                 -1.0, 1.0, 1e-10);
  REQUIRE_THAT(disk.value, Catch::Matchers::WithinAbs(M_PI / 2.0, 1e-8));
}

TEST_CASE("bisection refines to ulp scale") {
  const double r = bisect_root([](double x) { return x * x - 2.0; }, 0.0, 2.0);
  REQUIRE_THAT(r, Catch::Matchers::WithinULP(std::sqrt(2.0), 4));
  REQUIRE_THROWS_AS(bisect_root([](double x) { return x * x + 1.0; }, 0.0, 1.0),
                    std::invalid_argument);
}

TEST_CASE("nonpositive interval isolation") {
  auto iv = nonpositive_intervals([](double x) { return std::sin(x); }, 0.1, 4.0 * M_PI);
  REQUIRE(iv.size() == 2);
  double total = 0.0;
  for (auto [a, b] : iv) total += b - a;
  REQUIRE_THAT(total, Catch::Matchers::WithinAbs(2.0 * M_PI, 1e-9));
  REQUIRE_THAT(iv[0].first, Catch::Matchers::WithinAbs(M_PI, 1e-9));

  auto none = nonpositive_intervals([](double) { return 1.0; }, 0.0, 1.0);
  REQUIRE(none.empty());
  auto all = nonpositive_intervals([](double) { return -1.0; }, 0.0, 1.0);
  REQUIRE(all.size() == 1);
  REQUIRE(all[0] == std::pair{0.0, 1.0});
}

TEST_CASE("line fit recovers exact affine data") {
  std::vector<double> xs, ys;
  for (int i = 0; i < 10; ++i) {
    xs.push_back(0.5 * i);
    ys.push_back(3.0 * xs.back() + 1.0);
  }
  auto fit = fit_line(xs, ys);
  REQUIRE_THAT(fit.slope, Catch::Matchers::WithinAbs(3.0, 1e-13));
  REQUIRE_THAT(fit.intercept, Catch::Matchers::WithinAbs(1.0, 1e-13));
  REQUIRE(fit.rms_residual < 1e-13);
}

TEST_CASE("log radius grids include both endpoints") {
  auto r = log_radii(1.0 / 64.0, 4.0, 9);
  REQUIRE(r.size() == 9);
  REQUIRE_THAT(r.front(), Catch::Matchers::WithinAbs(1.0 / 64.0, 1e-15));
  REQUIRE_THAT(r.back(), Catch::Matchers::WithinAbs(4.0, 1e-12));
  for (std::size_t i = 1; i < r.size(); ++i) REQUIRE(r[i] > r[i - 1]);
  REQUIRE_THROWS_AS(log_radii(1.0, 1.0, 3), std::invalid_argument);
}
