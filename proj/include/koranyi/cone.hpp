#pragma once

#include <koranyi/ball.hpp>
#include <koranyi/core.hpp>
#include <koranyi/measure.hpp>
#include <koranyi/numerics.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

// Euclidean side of the double-cone constructions and the section profile of
// fourth-root product metrics:
//
//   * the cone {y in R^4 : y1^2 + y2^2 + y3^2 = y4^2} carries a surface
//     measure whose EUCLIDEAN ball masses are exactly (4 pi / 3) r^3 at every
//     point including the vertex; euclidean_cone_ball evaluates those masses
//     directly in R^4, independently of the gauge-metric engine, so the two
//     can be played against each other;
//   * embedded_cone_ball_equality spot-checks that on the isotropic embedding
//     of the cone (first four horizontal slots, slots 5..k free, everything
//     else zero) gauge balls and Euclidean balls carve out the same slice;
//   * heat_profile_constant(m) is the constant picked up when a measure with
//     ball masses c r^m is multiplied by a Lebesgue line under the metric
//     (|dp|^4 + dt^2)^{1/4}: the product has masses c I_m r^{m+2} with
//     I_m = B(1/2, m/4 + 1).
//
// The product construction itself lives in measure.hpp
// (heat_product_measure); verdicts about it come from uniformity.hpp.

namespace koranyi {

/// Membership in the double cone {y : y1^2+y2^2+y3^2 = y4^2}.  The residual
/// of the defining quadric is weighed against |y|^2 (the quadric is
/// 2-homogeneous), so membership is dilation stable and the vertex belongs.
inline bool cone_membership(const Eigen::Vector4d& y) {
  const double residual = y.head<3>().squaredNorm() - y[3] * y[3];
  return std::abs(residual) <= 1e-10 * y.squaredNorm();
}

/// Deterministic batch of cone points: uniform direction on the 2-sphere,
/// graph magnitude |y^| uniform in [rmin, rmax], equally likely branch sign.
inline std::vector<Eigen::Vector4d> sample_cone(std::uint64_t seed, int count,
                                                double rmin = 0.0, double rmax = 1.0) {
  if (count < 0)
    throw std::invalid_argument("sample_cone: count must be nonnegative");
  if (!(0.0 <= rmin && rmin <= rmax) || !std::isfinite(rmax))
    throw std::invalid_argument("sample_cone: need 0 <= rmin <= rmax < infinity");
  auto rng = substream(seed, 0x1c0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Eigen::Vector4d> out;
  out.reserve(static_cast<std::size_t>(count));
  while (static_cast<int>(out.size()) < count) {
    Eigen::Vector3d dir(gauss(rng), gauss(rng), gauss(rng));
    const double len = dir.norm();
    if (len < 1e-12) continue;  // resample a degenerate direction draw
    const double magnitude = rmin + (rmax - rmin) * unit(rng);
    const double sign = unit(rng) < 0.5 ? 1.0 : -1.0;
    Eigen::Vector4d y;
    y << (magnitude / len) * dir, sign * magnitude;
    out.push_back(y);
  }
  return out;
}

/// Surface measure of B_E(x, r) on the cone, for the Euclidean metric of R^4.
/// The cone is the union of the two Lipschitz graphs y4 = +-|y^| with area
/// element sqrt(2) dy^, and the intersection projects into |y^ - x^| <= r, so
/// the mass is a stratified Monte Carlo integral over that box per branch.
/// Deterministic in (samples, seed); the error bar is the 3-sigma bound.
inline BallEstimate euclidean_cone_ball(const Eigen::Vector4d& x, double r,
                                        long samples = 200'000,
                                        std::uint64_t seed = 1) {
  if (!cone_membership(x))
    throw std::invalid_argument("euclidean_cone_ball: center must lie on the cone");
  if (!(r > 0.0) || !std::isfinite(r))
    throw std::invalid_argument("euclidean_cone_ball: radius must be positive");
  if (samples < 2)
    throw std::invalid_argument("euclidean_cone_ball: need at least two samples");
  const Eigen::Vector3d head = x.head<3>();
  const double w0 = x[3];
  const double r2 = r * r;
  const std::vector<double> lo = {head[0] - r, head[1] - r, head[2] - r};
  const std::vector<double> hi = {head[0] + r, head[1] + r, head[2] + r};
  BallEstimate total;
  total.method = BallMethod::MonteCarlo;
  for (int branch = 0; branch < 2; ++branch) {
    const double sigma = branch == 0 ? 1.0 : -1.0;
    const auto f = [&](const std::vector<double>& u) {
      const Eigen::Vector3d yh(u[0], u[1], u[2]);
      const double lift = sigma * yh.norm() - w0;
      const double d2 = (yh - head).squaredNorm() + lift * lift;
      return d2 <= r2 ? std::numbers::sqrt2 : 0.0;
    };
    detail::accumulate(total, detail::mc_box(lo, hi, f, samples / 2, seed,
                                             static_cast<std::uint64_t>(branch)));
  }
  return total;
}

/// Samples the isotropically embedded cone around x and reports whether every
/// sample lands on the same side of both spheres: gauge distance to x vs
/// Euclidean distance to x, compared against r.  On this embedding the twist
/// term pairs slot j with slot j+n and every such product vanishes, so the
/// two distances agree exactly and the expected answer is true.  The center
/// must itself lie on the embedded cone: first four slots on the cone, slots
/// 5..k free, all remaining coordinates zero.
inline bool embedded_cone_ball_equality(const Point& x, double r, long samples, int k,
                                        std::uint64_t seed = 1) {
  const int n = x.n();
  if (n < 4 || k < 4 || k > n)
    throw std::invalid_argument("embedded_cone_ball_equality: need 4 <= k <= n");
  if (!(r >= 0.0) || !std::isfinite(r))
    throw std::invalid_argument(
        "embedded_cone_ball_equality: radius must be finite and nonnegative");
  if (samples < 1)
    throw std::invalid_argument("embedded_cone_ball_equality: need samples >= 1");
  const Eigen::Vector4d cone_part = x.coords.head<4>();
  if (!cone_membership(cone_part))
    throw std::invalid_argument(
        "embedded_cone_ball_equality: center must lie on the embedded cone");
  const double scale = 1.0 + x.coords.norm();
  for (int i = k; i < 2 * n + 1; ++i)
    if (std::abs(x.coords[i]) > 1e-12 * scale)
      throw std::invalid_argument(
          "embedded_cone_ball_equality: coordinates outside the isotropic slots "
          "must vanish");

  auto rng = substream(seed, 0x1c1);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double window = 2.0 * r;  // straddles the boundary shell
  for (long i = 0; i < samples; ++i) {
    Eigen::Vector3d head = x.coords.head<3>();
    Eigen::Vector3d dir(gauss(rng), gauss(rng), gauss(rng));
    const double len = dir.norm();
    if (len >= 1e-12) head += (window * std::cbrt(unit(rng)) / len) * dir;
    Point z = Point::origin(n);
    z.coords.head<3>() = head;
    z.coords[3] = (unit(rng) < 0.5 ? 1.0 : -1.0) * head.norm();
    for (int j = 4; j < k; ++j)
      z.coords[j] = x.coords[j] + window * (2.0 * unit(rng) - 1.0);
    const bool in_gauge = dist_h(x, z) <= r;
    const bool in_euclidean = (z.coords - x.coords).norm() <= r;
    if (in_gauge != in_euclidean) return false;
  }
  return true;
}

/// Section profile I_m = integral over [-1, 1] of (1 - tau^2)^{m/4} d tau,
/// in the Beta closed form B(1/2, m/4 + 1).  A base with ball masses c r^m
/// turns, under the product with a Lebesgue line in the fourth-root metric,
/// into masses c I_m r^{m+2}.  I_0 = 2 and I_2 = pi / 2.
inline double heat_profile_constant(int m) {
  if (m < 0) throw std::invalid_argument("heat_profile_constant: m must be >= 0");
  return std::beta(0.5, 1.0 + 0.25 * static_cast<double>(m));
}

}  // namespace koranyi
