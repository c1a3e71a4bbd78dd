#pragma once

#include <koranyi/ball.hpp>
#include <koranyi/core.hpp>
#include <koranyi/measure.hpp>
#include <koranyi/numerics.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

// Uniformity laboratory: decide whether a measure looks uniformly
// distributed (ball mass depends only on the radius) or s-uniform (mass is
// c r^s), estimate densities mu(B(x,r))/r^s, build blow-up and tangent
// rescalings, and evaluate the exponential support functional F(x, s) and
// its moment polynomials P_j(x).
//
// Verdicts are finite-precision: "uniformly distributed" means the relative
// spread of ball masses across sampled support points stays below a declared
// threshold plus the propagated evaluation error, on a radius grid.  Atomic
// measures get probe radii at every pairwise distance (and at midpoints
// between consecutive distinct distances), which makes the check equivalent
// to comparing full distance multisets -- in particular exact for counting
// measures.

namespace koranyi {

enum class Verdict { UniformlyDistributed, SUniform, Neither, Inconclusive };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::UniformlyDistributed: return "uniformly-distributed";
    case Verdict::SUniform: return "s-uniform";
    case Verdict::Neither: return "neither";
    default: return "inconclusive";
  }
}

/// Dyadic default grid 2^{-6}, ..., 2^{2}.
inline std::vector<double> default_radii() { return log_radii(1.0 / 64.0, 4.0, 9); }

struct UniformityOptions {
  int num_points = 8;
  std::vector<double> radii = default_radii();
  double tol = 1e-3;   // relative deviation / log-fit residual threshold
  std::uint64_t seed = 1;
  BallOptions ball{};
};

struct UniformityReport {
  std::vector<Point> points;
  std::vector<double> radii;
  std::vector<std::vector<BallEstimate>> values;  // values[point][radius]
  double max_rel_deviation = 0.0;  // max over r of cross-point spread / mean
  double error_budget = 0.0;       // max over r of propagated relative error
  double fitted_exponent = 0.0;    // pooled log-log slope
  double fitted_constant = 0.0;    // exp(intercept); meaningful up to scaling
  double fit_residual = 0.0;       // rms residual of the pooled fit
  Verdict verdict = Verdict::Inconclusive;
};

namespace detail {

inline void require_on_support(const MeasureSpec& mu, const Point& x,
                               const char* what) {
  const double res = support_residual(mu, x);
  if (!(res <= 1e-6 * (1.0 + x.coords.norm())))
    throw std::invalid_argument(std::string(what) + ": point is not on the support");
}

/// Points the uniformity checks evaluate at.  Atomic supports are finite, so
/// every atom (up to a cap) is used; other kinds draw deterministic samples.
inline std::vector<Point> support_points(const MeasureSpec& mu, int count,
                                         std::uint64_t seed) {
  if (const auto* atomic = std::get_if<AtomicSpec>(&mu.payload)) {
    std::vector<Point> pts;
    const std::size_t cap =
        std::min<std::size_t>(atomic->atoms.size(),
                              std::max<std::size_t>(static_cast<std::size_t>(count), 64));
    for (std::size_t i = 0; i < cap; ++i) pts.push_back(atomic->atoms[i].point);
    return pts;
  }
  return sample_support(mu, count, seed);
}

/// For atomic measures, radii at which counts can change: all pairwise
/// distances plus midpoints of consecutive distinct values.  Counting at
/// these radii distinguishes any two differing distance multisets.
inline std::vector<double> augment_probe_radii(const AtomicSpec& spec,
                                               std::vector<double> radii) {
  std::vector<double> dists;
  const auto& atoms = spec.atoms;
  for (std::size_t i = 0; i < atoms.size(); ++i)
    for (std::size_t j = i + 1; j < atoms.size(); ++j)
      dists.push_back(dist_h(atoms[i].point, atoms[j].point));
  std::sort(dists.begin(), dists.end());
  for (std::size_t i = 0; i < dists.size(); ++i) {
    if (!(dists[i] > 0.0)) continue;
    if (!radii.empty() && std::abs(dists[i] - radii.back()) <=
                              1e-12 * (1.0 + dists[i]))
      continue;
    radii.push_back(dists[i]);
    if (i + 1 < dists.size() && dists[i + 1] - dists[i] > 1e-12 * (1.0 + dists[i]))
      radii.push_back(0.5 * (dists[i] + dists[i + 1]));
  }
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
  if (radii.size() > 4096) radii.resize(4096);
  return radii;
}

inline void require_radii(const std::vector<double>& radii) {
  if (radii.size() < 2)
    throw std::invalid_argument("uniformity: need at least two radii");
  for (std::size_t i = 0; i < radii.size(); ++i)
    if (!(radii[i] > 0.0) || !std::isfinite(radii[i]) ||
        (i > 0 && !(radii[i] > radii[i - 1])))
      throw std::invalid_argument("uniformity: radii must be positive increasing");
}

}  // namespace detail

/// Tabulates ball masses over support points x radii, measures the relative
/// cross-point spread and the pooled log-log growth fit, and applies the
/// uniformly-distributed threshold.  No span requirement on the grid; use
/// check_s_uniform for exponent verdicts.
inline UniformityReport uniformity_scan(const MeasureSpec& mu,
                                        const UniformityOptions& opts = {}) {
  detail::require_radii(opts.radii);
  if (opts.num_points < 2)
    throw std::invalid_argument("uniformity: need at least two support points");

  UniformityReport rep;
  rep.points = detail::support_points(mu, opts.num_points, opts.seed);
  rep.radii = opts.radii;
  if (const auto* atomic = std::get_if<AtomicSpec>(&mu.payload))
    rep.radii = detail::augment_probe_radii(*atomic, rep.radii);

  bool all_converged = true;
  rep.values.resize(rep.points.size());
  for (std::size_t p = 0; p < rep.points.size(); ++p) {
    rep.values[p].reserve(rep.radii.size());
    for (double r : rep.radii) {
      rep.values[p].push_back(ball_measure(mu, rep.points[p], r, opts.ball));
      all_converged = all_converged && rep.values[p].back().converged;
    }
  }

  for (std::size_t j = 0; j < rep.radii.size(); ++j) {
    double vmin = std::numeric_limits<double>::infinity();
    double vmax = 0.0, sum = 0.0, emax = 0.0;
    for (std::size_t p = 0; p < rep.points.size(); ++p) {
      const auto& e = rep.values[p][j];
      vmin = std::min(vmin, e.value);
      vmax = std::max(vmax, e.value);
      sum += e.value;
      emax = std::max(emax, e.abs_error);
    }
    if (vmax <= 0.0) continue;  // all points agree on zero mass
    const double mean = sum / static_cast<double>(rep.points.size());
    rep.max_rel_deviation = std::max(rep.max_rel_deviation, (vmax - vmin) / mean);
    rep.error_budget = std::max(rep.error_budget, 2.0 * emax / mean);
  }

  std::vector<double> lr, lv;
  for (std::size_t p = 0; p < rep.points.size(); ++p)
    for (std::size_t j = 0; j < rep.radii.size(); ++j)
      if (rep.values[p][j].value > 0.0) {
        lr.push_back(std::log(rep.radii[j]));
        lv.push_back(std::log(rep.values[p][j].value));
      }
  if (lr.size() >= 2) {
    const LineFit fit = fit_line(lr, lv);
    rep.fitted_exponent = fit.slope;
    rep.fitted_constant = std::exp(fit.intercept);
    rep.fit_residual = fit.rms_residual;
  }

  if (!all_converged)
    rep.verdict = Verdict::Inconclusive;
  else if (rep.max_rel_deviation < opts.tol + rep.error_budget)
    rep.verdict = Verdict::UniformlyDistributed;
  else
    rep.verdict = Verdict::Neither;
  return rep;
}

/// Does mu(B(x, r)) depend on r only?  Threshold: relative spread below
/// tol + propagated error at every grid radius.
inline UniformityReport check_uniformly_distributed(const MeasureSpec& mu,
                                                    const UniformityOptions& opts = {}) {
  return uniformity_scan(mu, opts);
}

/// Does mu(B(x, r)) = c r^s hold?  Requires a grid spanning at least two
/// decades, the uniformly-distributed thresholds, and a pooled log-log fit
/// residual below tol.
inline UniformityReport check_s_uniform(const MeasureSpec& mu,
                                        const UniformityOptions& opts = {}) {
  detail::require_radii(opts.radii);
  if (opts.radii.back() < 100.0 * opts.radii.front() * (1.0 - 1e-9))
    throw std::invalid_argument("check_s_uniform: radii must span two decades");
  UniformityReport rep = uniformity_scan(mu, opts);
  if (rep.verdict == Verdict::UniformlyDistributed && rep.fit_residual < opts.tol)
    rep.verdict = Verdict::SUniform;
  return rep;
}

// ---------------------------------------------------------------------------
// Densities

struct DensityEstimate {
  Point point;
  double s = 0.0;
  double upper = 0.0;  // max of mu(B(x,r))/r^s over the small-radius tail
  double lower = 0.0;  // min over the same tail
  std::vector<double> radii_used;  // decreasing
  std::vector<double> ratios;      // mu(B(x,r))/r^s per radius
  std::string trend;               // "finite", "to-zero", "to-infinity", "undetermined"
  bool converged = true;
};

/// Ratios mu(B(x, r))/r^s along a decreasing radius grid (floored at 1e-4),
/// with the upper/lower estimates taken over the small-radius tail half and
/// a trend flag from the log-log slope of the ratios.  The r -> 0 limit is
/// extrapolated, never certified.
inline DensityEstimate density(const MeasureSpec& mu, const Point& x, double s,
                               const std::vector<double>& radii_decreasing,
                               const BallOptions& ball = {}) {
  if (radii_decreasing.size() < 2)
    throw std::invalid_argument("density: need at least two radii");
  for (std::size_t i = 0; i < radii_decreasing.size(); ++i) {
    const double r = radii_decreasing[i];
    if (!(r >= 1e-4) || !std::isfinite(r) ||
        (i > 0 && !(r < radii_decreasing[i - 1])))
      throw std::invalid_argument(
          "density: radii must decrease and stay above the 1e-4 floor");
  }
  if (!std::isfinite(s)) throw std::invalid_argument("density: s must be finite");
  detail::require_on_support(mu, x, "density");

  DensityEstimate est;
  est.point = x;
  est.s = s;
  est.radii_used = radii_decreasing;
  for (double r : radii_decreasing) {
    const auto b = ball_measure(mu, x, r, ball);
    est.converged = est.converged && b.converged;
    est.ratios.push_back(b.value / std::pow(r, s));
  }

  const std::size_t half = est.ratios.size() / 2;
  est.upper = -std::numeric_limits<double>::infinity();
  est.lower = std::numeric_limits<double>::infinity();
  for (std::size_t i = half; i < est.ratios.size(); ++i) {
    est.upper = std::max(est.upper, est.ratios[i]);
    est.lower = std::min(est.lower, est.ratios[i]);
  }

  std::vector<double> lr, lv;
  for (std::size_t i = 0; i < est.ratios.size(); ++i)
    if (est.ratios[i] > 0.0) {
      lr.push_back(std::log(est.radii_used[i]));
      lv.push_back(std::log(est.ratios[i]));
    }
  if (lr.size() < 2) {
    est.trend = "undetermined";
    est.converged = false;
  } else {
    const double slope = fit_line(lr, lv).slope;
    if (slope > 0.05)
      est.trend = "to-zero";  // ratio ~ r^slope vanishes as r -> 0
    else if (slope < -0.05)
      est.trend = "to-infinity";
    else
      est.trend = "finite";
  }
  return est;
}

// ---------------------------------------------------------------------------
// Blow-ups and tangent rescalings

/// nu_k(A) = k^s mu(x0 . delta_{1/k}(A)): recenters at x0 and zooms by k,
/// scaling mass by k^s.  Realized as a Transformed spec, so ball masses obey
/// nu_k(B(0, N)) = k^s mu(B(x0, N/k)) exactly.
inline MeasureSpec blowup(const MeasureSpec& mu, const Point& x0, double k, double s) {
  if (!(k > 0.0) || !std::isfinite(k) || !std::isfinite(s))
    throw std::invalid_argument("blowup: need finite k > 0 and finite s");
  detail::require_on_support(mu, x0, "blowup");
  const Similarity map(dilate(k, inverse(x0)),
                       Eigen::MatrixXd::Identity(2 * mu.n, 2 * mu.n), false, k);
  return transform_measure(mu, map, std::pow(k, s));
}

/// c . (T_{a,r})_# mu with T_{a,r}(p) = delta_{1/r}(a^{-1} . p); maps
/// B(a, r R) onto B(0, R).
inline MeasureSpec tangent_transform(const MeasureSpec& mu, const Point& a, double r,
                                     double c) {
  if (!(r > 0.0) || !std::isfinite(r) || !(c > 0.0) || !std::isfinite(c))
    throw std::invalid_argument("tangent_transform: need r > 0 and c > 0");
  const Similarity map(dilate(1.0 / r, inverse(a)),
                       Eigen::MatrixXd::Identity(2 * mu.n, 2 * mu.n), false, 1.0 / r);
  return transform_measure(mu, map, c);
}

// ---------------------------------------------------------------------------
// Support functional and moment polynomials

namespace detail {

/// Integral of f over a bounded-support measure: exact sums on atoms,
/// adaptive quadrature on closed curves, recursion through similarities.
/// The integrand is type-erased so the similarity recursion terminates at
/// the value level instead of minting a new template instantiation per
/// nesting depth.
inline double integrate_bounded(const MeasureSpec& mu,
                                const std::function<double(const Point&)>& f,
                                double abs_tol) {
  if (const auto* atomic = std::get_if<AtomicSpec>(&mu.payload)) {
    double sum = 0.0;
    for (const auto& a : atomic->atoms) sum += a.weight * f(a.point);
    return sum;
  }
  if (const auto* curve = std::get_if<CurveSpec>(&mu.payload)) {
    if (const auto* circ = std::get_if<CircleArcs>(&curve->family)) {
      double sum = 0.0;
      const double per = abs_tol / static_cast<double>(circ->heights.size());
      for (double h : circ->heights) {
        const auto g = [&](double theta) {
          return f(Point(circ->center[0] + circ->radius * std::cos(theta),
                         circ->center[1] + circ->radius * std::sin(theta), h));
        };
        sum += curve->density * integrate_adaptive(g, 0.0, 2.0 * M_PI, per).value;
      }
      return sum;
    }
    if (const auto* lc = std::get_if<LiftedCircle>(&curve->family)) {
      const auto g = [&](double u) { return f(lifted_circle_point(*lc, u)); };
      return curve->density * 2.0 * M_PI *
             integrate_adaptive(g, 0.0, 1.0, abs_tol / (2.0 * M_PI)).value;
    }
    throw std::invalid_argument("support functional: measure has unbounded support");
  }
  if (const auto* tr = std::get_if<TransformedSpec>(&mu.payload)) {
    const auto g = [&](const Point& w) { return f(tr->map(w)); };
    return tr->mass_scale *
           integrate_bounded(*tr->inner, g, abs_tol / tr->mass_scale);
  }
  throw std::invalid_argument("support functional: measure has unbounded support");
}

inline double ipow(double base, int j) {
  double out = 1.0;
  for (int i = 0; i < j; ++i) out *= base;
  return out;
}

}  // namespace detail

/// F(x, s) = integral of exp(-s d(x,z)^4) - exp(-s d(x0,z)^4) d mu(z).
/// Vanishes whenever balls around x and x0 carry identical masses (x, x0
/// both on the support of a uniformly distributed measure); strictly
/// negative for large s when x sits off the support.
inline double support_functional(const MeasureSpec& mu, const Point& x,
                                 const Point& x0, double s, double tol = 1e-10) {
  if (!(s > 0.0) || !std::isfinite(s))
    throw std::invalid_argument("support_functional: need finite s > 0");
  if (!bounded_support(mu))
    throw std::invalid_argument("support_functional: measure has unbounded support");
  detail::require_on_support(mu, x0, "support_functional");
  const auto f = [&](const Point& z) {
    return std::exp(-s * dist4(x, z)) - std::exp(-s * dist4(x0, z));
  };
  return detail::integrate_bounded(mu, f, tol);
}

/// P_j(x) = integral of d(x,z)^{4j} - d(x0,z)^{4j} d mu(z): the j-th
/// coefficient (up to (-s)^j / j!) in the expansion of F(x, s) around s = 0.
inline double moment_polynomial(const MeasureSpec& mu, int j, const Point& x,
                                const Point& x0, double tol = 1e-12) {
  if (j < 1) throw std::invalid_argument("moment_polynomial: need j >= 1");
  if (!bounded_support(mu))
    throw std::invalid_argument("moment_polynomial: measure has unbounded support");
  detail::require_on_support(mu, x0, "moment_polynomial");
  const auto f = [&](const Point& z) {
    return detail::ipow(dist4(x, z), j) - detail::ipow(dist4(x0, z), j);
  };
  return detail::integrate_bounded(mu, f, tol);
}

}  // namespace koranyi
