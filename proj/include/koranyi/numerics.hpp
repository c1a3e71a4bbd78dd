#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

// Small numerics toolkit shared by the measure engine and the labs:
// deterministic RNG substreams, adaptive quadrature, root isolation,
// least-squares line fits, and turn-based trig (exact at quarter turns).

namespace koranyi {

// ---------------------------------------------------------------------------
// Deterministic random substreams.

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Engine for stream `stream` of master seed `seed`.  Streams are mutually
/// independent for practical purposes and reproducible regardless of how the
/// work is partitioned, which is what keeps reports byte-identical.
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ull * (stream + 1));
  const std::uint64_t a = splitmix64(s);
  const std::uint64_t b = splitmix64(s);
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return std::mt19937_64(seq);
}

// ---------------------------------------------------------------------------
// Turn-based trig: cos/sin of (2 pi t).  Quarter turns are bit-exact, so
// polygon constructors produce atoms like (0, 1, 0) with no trailing 1e-17.

inline double cos_turn(double t) {
  double u = t - std::floor(t);
  const int q = static_cast<int>(std::floor(4.0 * u + 0.5));
  const double x = 2.0 * M_PI * (u - 0.25 * q);
  switch (q & 3) {
    case 0: return std::cos(x);
    case 1: return -std::sin(x);
    case 2: return -std::cos(x);
    default: return std::sin(x);
  }
}

inline double sin_turn(double t) {
  double u = t - std::floor(t);
  const int q = static_cast<int>(std::floor(4.0 * u + 0.5));
  const double x = 2.0 * M_PI * (u - 0.25 * q);
  switch (q & 3) {
    case 0: return std::sin(x);
    case 1: return std::cos(x);
    case 2: return -std::sin(x);
    default: return -std::cos(x);
  }
}

// ---------------------------------------------------------------------------
// Quadrature.

struct QuadratureResult {
  double value = 0.0;
  double abs_error = 0.0;
  long nodes = 0;
  bool converged = true;
};

namespace detail {

template <class F>
void adaptive_simpson_rec(F& f, double a, double m, double b, double fa, double fm,
                          double fb, double whole, double tol, int depth,
                          long max_nodes, QuadratureResult& out) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  out.nodes += 2;
  const double h = b - a;
  const double left = h / 12.0 * (fa + 4.0 * flm + fm);
  const double right = h / 12.0 * (fm + 4.0 * frm + fb);
  const double err = (left + right - whole) / 15.0;
  if (depth <= 0 || out.nodes >= max_nodes) {
    out.value += left + right + err;
    out.abs_error += std::abs(err);
    if (std::abs(err) > tol) out.converged = false;
    return;
  }
  if (std::abs(err) <= tol || h <= 1e-14 * (std::abs(a) + std::abs(b) + 1.0)) {
    out.value += left + right + err;  // Richardson-improved panel
    out.abs_error += std::abs(err);
    return;
  }
  adaptive_simpson_rec(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1, max_nodes,
                       out);
  adaptive_simpson_rec(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1, max_nodes,
                       out);
}

}  // namespace detail

/// Adaptive Simpson with Richardson extrapolation.  abs_tol is an absolute
/// target for the whole interval; the result reports an error estimate and
/// whether every panel met its share of the budget.  The node budget caps the
/// cost of unattainable tolerances (for example below machine precision):
/// once exhausted, remaining panels are accepted as-is and the result is
/// flagged unconverged instead of subdividing without progress.
template <class F>
QuadratureResult integrate_adaptive(F&& f, double a, double b, double abs_tol,
                                    int max_depth = 42, long max_nodes = 2'000'000) {
  QuadratureResult out;
  if (a == b) return out;
  if (!(a < b)) throw std::invalid_argument("integrate_adaptive: need a < b");
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  out.nodes = 3;
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  detail::adaptive_simpson_rec(f, a, m, b, fa, fm, fb, whole,
                               std::max(abs_tol, 1e-300), max_depth, max_nodes, out);
  return out;
}

// ---------------------------------------------------------------------------
// Root finding.

/// Bisection down to a handful of ulps.  Requires f(lo) and f(hi) of opposite
/// sign (zero counts as either); returns the midpoint of the final bracket.
template <class F>
double bisect_root(F&& f, double lo, double hi) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0))
    throw std::invalid_argument("bisect_root: endpoints do not bracket a sign change");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    const double fmid = f(mid);
    if (fmid == 0.0) return mid;
    if ((fmid > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() *
                       (1.0 + std::abs(lo) + std::abs(hi)))
      break;
  }
  return 0.5 * (lo + hi);
}

/// Sub-intervals of [a, b] where f <= 0, located by a uniform scan of
/// `scan_points` panels followed by bisection of every sign-change bracket.
/// Intervals thinner than one panel can be missed; callers are expected to
/// pass a window tight enough that this cannot happen.
template <class F>
std::vector<std::pair<double, double>> nonpositive_intervals(F&& f, double a, double b,
                                                             int scan_points = 2048) {
  std::vector<std::pair<double, double>> out;
  if (!(a < b)) return out;
  if (scan_points < 2) scan_points = 2;
  const double h = (b - a) / scan_points;
  double prev_x = a;
  double prev_f = f(a);
  bool inside = prev_f <= 0.0;
  double start = inside ? a : 0.0;
  for (int i = 1; i <= scan_points; ++i) {
    const double x = (i == scan_points) ? b : a + i * h;
    const double fx = f(x);
    const bool now = fx <= 0.0;
    if (now != inside) {
      const double root = bisect_root(f, prev_x, x);
      if (now) {
        start = root;
      } else {
        out.emplace_back(start, root);
      }
      inside = now;
    }
    prev_x = x;
    prev_f = fx;
  }
  if (inside) out.emplace_back(start, b);
  return out;
}

// ---------------------------------------------------------------------------
// Least squares.

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
  long count = 0;
};

inline LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw std::invalid_argument("fit_line: need >= 2 paired samples");
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.slope * xs[i] + fit.intercept);
    rss += r * r;
  }
  fit.rms_residual = std::sqrt(rss / n);
  fit.count = static_cast<long>(xs.size());
  return fit;
}

// ---------------------------------------------------------------------------
// Sampling profiles.

/// Uniform direction on the unit sphere of R^3.
inline void sphere_direction(std::mt19937_64& rng, double out[3]) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  double n2 = 0.0;
  do {
    for (int i = 0; i < 3; ++i) out[i] = gauss(rng);
    n2 = out[0] * out[0] + out[1] * out[1] + out[2] * out[2];
  } while (n2 < 1e-24);
  const double inv = 1.0 / std::sqrt(n2);
  for (int i = 0; i < 3; ++i) out[i] *= inv;
}

/// Geometric (log-spaced) radius grid from lo to hi inclusive.
inline std::vector<double> log_radii(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2)
    throw std::invalid_argument("log_radii: need 0 < lo < hi and count >= 2");
  std::vector<double> r(count);
  for (int i = 0; i < count; ++i)
    r[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
  return r;
}

}  // namespace koranyi
