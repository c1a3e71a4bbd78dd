#pragma once

#include <koranyi/core.hpp>
#include <koranyi/measure.hpp>
#include <koranyi/numerics.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <variant>
#include <vector>

// Ball-mass engine: mu(B(x, r)) for closed gauge balls, dispatched on the
// measure kind.  Every family is reduced as far as exact mathematics allows
// before any numerics run:
//
//   * atoms               exact weighted count with a tie tolerance
//   * vertical lines      closed form per line
//   * subgroup Haar       closed form or a single radial quadrature
//   * curves              parameter intervals by root isolation
//   * cylinder / plane    1-D quadrature of exact vertical section lengths
//   * heat products       1-D reduction over the base's radial profile
//   * light-cone patches  Monte Carlo over a tight parameter box
//   * transformed         delegation to the inner measure
//
// The workhorse identity: for any family of the form (point h(u)) x R in the
// vertical direction, the vertical component of x^{-1} p is t - x3 - A(x',
// h(u)), so as t sweeps the fiber the in-ball condition carves out an
// interval of length 2 sqrt(max(0, r^4 - |h(u) - x'|^4)) -- the twist term
// A only translates the interval.  This collapses one integration dimension
// exactly, for every center.

namespace koranyi {

enum class BallMethod { ExactCount, ClosedForm, Quadrature, MonteCarlo };

inline const char* ball_method_name(BallMethod m) {
  switch (m) {
    case BallMethod::ExactCount: return "exact-count";
    case BallMethod::ClosedForm: return "closed-form";
    case BallMethod::Quadrature: return "quadrature";
    default: return "monte-carlo";
  }
}

struct BallEstimate {
  double value = 0.0;
  double abs_error = 0.0;
  BallMethod method = BallMethod::ClosedForm;
  long evaluations = 0;
  bool converged = true;
};

struct BallOptions {
  double tol = 1e-9;            // relative quadrature budget per evaluation
  std::uint64_t seed = 1;       // Monte Carlo substream seed
  long mc_samples = 1'000'000;  // Monte Carlo budget per evaluation
  int scan_points = 2048;       // root-isolation scan resolution
};

/// Atoms within distance r of x count as inside when d <= r + this slack, so
/// that configurations built from exact coordinates (polygons, lattices) hit
/// their ties deterministically.
inline constexpr double atom_tie_tolerance = 1e-12;

namespace detail {

/// Volume of the Euclidean unit ball in R^k.
inline double unit_ball_volume(int k) {
  return std::pow(M_PI, 0.5 * k) / std::tgamma(0.5 * k + 1.0);
}

/// Surface area of the unit sphere S^{k-1} in R^k.
inline double unit_sphere_area(int k) { return k * unit_ball_volume(k); }

/// Exact length of {t : |z'|^4 + (t - shift)^2 <= r^4} given s2 = |z'|^2.
inline double vertical_section(double r4, double s2) {
  const double rem = r4 - s2 * s2;
  return rem > 0.0 ? 2.0 * std::sqrt(rem) : 0.0;
}

inline void require_center(const MeasureSpec& mu, const Point& x, double r) {
  if (x.n() != mu.n)
    throw std::invalid_argument("ball_measure: center dimension mismatch");
  if (!(r > 0.0) || !std::isfinite(r))
    throw std::invalid_argument("ball_measure: radius must be positive and finite");
}

/// Sum of the lengths of {f <= 0} inside [lo, hi], by scan + bisection.
template <class F>
BallEstimate isolate_mass(F&& f, double lo, double hi, int scan_points) {
  BallEstimate out;
  out.method = BallMethod::Quadrature;
  if (!(lo < hi)) return out;
  const auto segments = nonpositive_intervals(f, lo, hi, scan_points);
  double len = 0.0;
  for (const auto& [a, b] : segments) len += b - a;
  out.value = len;
  out.abs_error = static_cast<double>(2 * segments.size() + 1) * 8.0 *
                  std::numeric_limits<double>::epsilon() *
                  (1.0 + std::abs(lo) + std::abs(hi));
  out.evaluations = scan_points;
  return out;
}

/// Angular window on a circle of radius rr centered rho away from the ball
/// center: the chord condition |p' - x'| <= r holds for |angle - phi| <= beta.
/// Returns false when the window is empty; full = true means the whole turn.
inline bool chord_window(double rho, double rr, double r, double& beta, bool& full) {
  full = false;
  const double denom = 2.0 * rho * rr;
  if (denom <= 0.0) {
    // Concentric: the chord distance is constant |rho - rr|.
    if (std::abs(rho - rr) > r) return false;
    full = true;
    return true;
  }
  const double arg = (rho * rho + rr * rr - r * r) / denom;
  if (arg >= 1.0) {
    if (std::abs(rho - rr) > r) return false;
    beta = 0.0;  // tangency
    return true;
  }
  if (arg <= -1.0) {
    full = true;
    return true;
  }
  beta = std::acos(arg);
  return true;
}

/// Adaptive quadrature with a relative tolerance expressed against an a
/// priori bound on the integral's magnitude.
template <class F>
QuadratureResult integrate_rel(F&& f, double a, double b, double bound, double rel_tol) {
  const double abs_tol = std::max(rel_tol * std::max(bound, 1e-300), 1e-300);
  return integrate_adaptive(f, a, b, abs_tol);
}

/// Quadrature tuned for section integrands: they vanish like a square root
/// at the ends of their support window, so substituting u = mid + half sin v
/// turns the edge behavior into an analytic cos^2 profile the adaptive rule
/// resolves at full speed.
template <class F>
QuadratureResult integrate_window(F&& f, double a, double b, double bound,
                                  double rel_tol) {
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  const auto g = [&](double v) {
    return f(mid + half * std::sin(v)) * half * std::cos(v);
  };
  return integrate_rel(g, -0.5 * M_PI, 0.5 * M_PI, bound, rel_tol);
}

inline BallEstimate from_quadrature(const QuadratureResult& q, double factor) {
  BallEstimate out;
  out.method = BallMethod::Quadrature;
  out.value = factor * q.value;
  out.abs_error = std::abs(factor) * q.abs_error;
  out.evaluations = q.nodes;
  out.converged = q.converged;
  return out;
}

inline void accumulate(BallEstimate& total, const BallEstimate& part) {
  total.value += part.value;
  total.abs_error = std::hypot(total.abs_error, part.abs_error);
  total.evaluations += part.evaluations;
  total.converged = total.converged && part.converged;
}

// ---------------------------------------------------------------------------
// Stratified Monte Carlo over an axis-aligned parameter box.  The first axis
// is sliced into `strata` equal pieces with independent substreams, so the
// result is deterministic in (seed, stream_base) and the error estimate is
// the stratified 3-sigma bound.

template <class F>
BallEstimate mc_box(const std::vector<double>& lo, const std::vector<double>& hi, F&& f,
                    long samples, std::uint64_t seed, std::uint64_t stream_base) {
  const int dim = static_cast<int>(lo.size());
  BallEstimate out;
  out.method = BallMethod::MonteCarlo;
  double volume = 1.0;
  for (int d = 0; d < dim; ++d) {
    if (!(hi[d] > lo[d])) return out;  // empty box: mass 0, error 0
    volume *= hi[d] - lo[d];
  }
  const int strata = 64;
  const long per = std::max<long>(2, samples / strata);
  const double slice = (hi[0] - lo[0]) / strata;
  const double slice_volume = volume / strata;
  double var_sum = 0.0;
  std::vector<double> u(dim);
  for (int s = 0; s < strata; ++s) {
    auto rng = substream(seed, stream_base * 64 + static_cast<std::uint64_t>(s));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double sum = 0.0, sum2 = 0.0;
    for (long i = 0; i < per; ++i) {
      u[0] = lo[0] + slice * (s + unit(rng));
      for (int d = 1; d < dim; ++d) u[d] = lo[d] + (hi[d] - lo[d]) * unit(rng);
      const double v = f(u);
      sum += v;
      sum2 += v * v;
    }
    const double mean = sum / per;
    const double var = std::max(0.0, sum2 / per - mean * mean);
    out.value += slice_volume * mean;
    var_sum += slice_volume * slice_volume * var / per;
    out.evaluations += per;
  }
  out.abs_error = 3.0 * std::sqrt(var_sum);
  return out;
}

// ---------------------------------------------------------------------------
// Family evaluators.  Each one receives the full center and radius and
// returns the mass contribution of its family.

inline BallEstimate atomic_ball(const AtomicSpec& spec, const Point& x, double r) {
  BallEstimate out;
  out.method = BallMethod::ExactCount;
  const double cutoff = r + atom_tie_tolerance * std::max(r, 1.0);
  const double cutoff4 = cutoff * cutoff * cutoff * cutoff;
  for (const auto& a : spec.atoms)
    if (dist4(x, a.point) <= cutoff4) out.value += a.weight;
  out.evaluations = static_cast<long>(spec.atoms.size());
  return out;
}

inline BallEstimate circle_arcs_ball(const CircleArcs& circ, double density,
                                     const Point& x, double r, const BallOptions& opts) {
  const Eigen::Vector2d xy(x.coords[0], x.coords[1]);
  const Eigen::Vector2d d = xy - circ.center;
  const double rho = d.norm();
  const double r4 = r * r * r * r;
  BallEstimate total;
  total.method = BallMethod::Quadrature;
  double beta = 0.0;
  bool full = false;
  if (!chord_window(rho, circ.radius, r, beta, full)) return total;
  const double phi = (rho > 0.0) ? std::atan2(d[1], d[0]) : 0.0;
  double lo = full ? 0.0 : phi - beta;
  double hi = full ? 2.0 * M_PI : phi + beta;
  const double pad = full ? 0.0 : 1e-10 * (1.0 + beta);
  lo -= pad;
  hi += pad;
  for (double h : circ.heights) {
    const auto f = [&](double theta) {
      const Point p(circ.center[0] + circ.radius * std::cos(theta),
                    circ.center[1] + circ.radius * std::sin(theta), h);
      return dist4(x, p) - r4;
    };
    BallEstimate part = isolate_mass(f, lo, hi, opts.scan_points);
    part.value *= density;
    part.abs_error *= density;
    accumulate(total, part);
  }
  return total;
}

inline BallEstimate vertical_lines_ball(const VerticalLines& lines, double density,
                                        const Point& x, double r) {
  BallEstimate out;
  out.method = BallMethod::ClosedForm;
  const Eigen::Vector2d xy(x.coords[0], x.coords[1]);
  const double r4 = r * r * r * r;
  for (const auto& c : lines.through) {
    const double s2 = (xy - c).squaredNorm();
    out.value += density * vertical_section(r4, s2);
  }
  out.abs_error = 4.0 * std::numeric_limits<double>::epsilon() * out.value;
  out.evaluations = static_cast<long>(lines.through.size());
  return out;
}

inline BallEstimate horizontal_line_ball(const HorizontalLine& hl, double density,
                                         const Point& x, double r,
                                         const BallOptions& opts) {
  // Pull the center back so the curve is t -> (t v, 0).
  const Point q = multiply(inverse(hl.base), x);
  const Eigen::Vector2d qxy(q.coords[0], q.coords[1]);
  const double along = qxy.dot(hl.direction);
  const double rho2 = std::max(0.0, qxy.squaredNorm() - along * along);
  const double band = r * r - rho2;
  BallEstimate out;
  out.method = BallMethod::Quadrature;
  if (band <= 0.0) return out;
  const double w = std::sqrt(band);
  const double pad = 1e-10 * (1.0 + w);
  const double r4 = r * r * r * r;
  const auto f = [&](double t) {
    const Point p(t * hl.direction[0], t * hl.direction[1], 0.0);
    return dist4(q, p) - r4;
  };
  out = isolate_mass(f, along - w - pad, along + w + pad, opts.scan_points);
  out.value *= density;
  out.abs_error *= density;
  return out;
}

inline BallEstimate lifted_circle_ball(const LiftedCircle& lc, double density,
                                       const Point& x, double r,
                                       const BallOptions& opts) {
  // The helix height is not periodic, so the full single-turn parameter
  // domain is scanned; radii much smaller than the turn spacing need a finer
  // scan_points to be guaranteed not to miss a crossing.
  const double r4 = r * r * r * r;
  const auto f = [&](double u) { return dist4(x, lifted_circle_point(lc, u)) - r4; };
  BallEstimate out = isolate_mass(f, 0.0, 1.0, opts.scan_points);
  out.value *= density * 2.0 * M_PI;
  out.abs_error *= density * 2.0 * M_PI;
  return out;
}

inline BallEstimate vertical_plane_ball(const VerticalPlane& plane, double density,
                                        const Point& x, double r,
                                        const BallOptions& opts) {
  const Eigen::Vector2d xy(x.coords[0], x.coords[1]);
  const Eigen::Vector2d rel = xy - plane.origin;
  const double along = rel.dot(plane.direction);
  const double rho2 = std::max(0.0, rel.squaredNorm() - along * along);
  const double band = r * r - rho2;
  BallEstimate out;
  out.method = BallMethod::Quadrature;
  if (band <= 0.0) return out;
  const double w = std::sqrt(band);
  const double r4 = r * r * r * r;
  const auto f = [&](double s) {
    const double u = s - along;
    return vertical_section(r4, u * u + rho2);
  };
  const auto q =
      integrate_window(f, along - w, along + w, 2.0 * r * r * 2.0 * w, opts.tol);
  return from_quadrature(q, density);
}

inline BallEstimate cylinder_ball(const Cylinder& cyl, double density, const Point& x,
                                  double r, const BallOptions& opts) {
  const Eigen::Vector2d xy(x.coords[0], x.coords[1]);
  const Eigen::Vector2d d = xy - cyl.center;
  const double rho = d.norm();
  BallEstimate out;
  out.method = BallMethod::Quadrature;
  double beta = 0.0;
  bool full = false;
  if (!chord_window(rho, cyl.radius, r, beta, full)) return out;
  // Centering the domain at phi puts the section zeros (or, for a fully
  // covered cylinder, the innocuous far point) at the window ends.
  const double phi = (rho > 0.0) ? std::atan2(d[1], d[0]) : 0.0;
  const double lo = full ? phi - M_PI : phi - beta;
  const double hi = full ? phi + M_PI : phi + beta;
  if (!(lo < hi)) return out;
  const double r4 = r * r * r * r;
  const auto f = [&](double theta) {
    const double dx = cyl.center[0] + cyl.radius * std::cos(theta) - xy[0];
    const double dy = cyl.center[1] + cyl.radius * std::sin(theta) - xy[1];
    return vertical_section(r4, dx * dx + dy * dy);
  };
  const auto q = integrate_window(f, lo, hi, 2.0 * r * r * (hi - lo), opts.tol);
  return from_quadrature(q, density);
}

inline BallEstimate light_cone_ball(const LightConePatch& cone, double density, int n,
                                    const Point& x, double r, const BallOptions& opts) {
  // 3 + (k - 4) free parameters; tight box from |p' - x'| <= r.
  const int nfree = cone.k - 4;
  std::vector<double> lo(3 + nfree), hi(3 + nfree);
  for (int i = 0; i < 3; ++i) {
    lo[i] = x.coords[i] - r;
    hi[i] = x.coords[i] + r;
  }
  for (int j = 0; j < nfree; ++j) {
    lo[3 + j] = x.coords[4 + j] - r;
    hi[3 + j] = x.coords[4 + j] + r;
  }
  const double r4 = r * r * r * r;
  BallEstimate total;
  total.method = BallMethod::MonteCarlo;
  for (int branch = 0; branch < 2; ++branch) {
    const double sigma = branch == 0 ? 1.0 : -1.0;
    const auto f = [&](const std::vector<double>& u) {
      Point p = Point::origin(n);
      p.coords[0] = u[0];
      p.coords[1] = u[1];
      p.coords[2] = u[2];
      p.coords[3] = sigma * std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
      for (int j = 0; j < nfree; ++j) p.coords[4 + j] = u[3 + j];
      return dist4(x, p) <= r4 ? std::numbers::sqrt2 * density : 0.0;
    };
    accumulate(total, mc_box(lo, hi, f, opts.mc_samples / 2, opts.seed,
                             static_cast<std::uint64_t>(branch)));
  }
  return total;
}

inline BallEstimate subgroup_ball(const SubgroupHaarSpec& sub, int n, const Point& x,
                                  double r, const BallOptions& opts) {
  const Eigen::VectorXd xp = x.coords.head(2 * n);
  const double x3 = x.coords[2 * n];
  const double r4 = r * r * r * r;
  const int kh = static_cast<int>(sub.hbasis.size());

  // Projection of x' onto the horizontal span and the residual distance.
  Eigen::VectorXd proj = Eigen::VectorXd::Zero(2 * n);
  for (const auto& b : sub.hbasis) proj += b.dot(xp) * b;
  const double rho2 = std::max(0.0, (xp - proj).squaredNorm());

  if (sub.vertical) {
    if (kh == 0) {
      // Vertical axis: one exact section.
      BallEstimate out;
      out.method = BallMethod::ClosedForm;
      out.value = vertical_section(r4, xp.squaredNorm());
      out.abs_error = 4.0 * std::numeric_limits<double>::epsilon() * out.value;
      out.evaluations = 1;
      return out;
    }
    // W x R: the twist only shifts each vertical section, so the mass is the
    // radial integral of section lengths around the projected center.
    const double span = r * r - rho2;
    BallEstimate out;
    out.method = BallMethod::Quadrature;
    if (span <= 0.0) return out;
    const double mmax = std::sqrt(span);
    const double area = unit_sphere_area(kh);
    const auto f = [&](double m) {
      return std::pow(m, kh - 1) * vertical_section(r4, m * m + rho2);
    };
    const double bound = std::pow(mmax, kh - 1) * 2.0 * r * r * mmax;
    const auto q = integrate_window(f, 0.0, mmax, bound, opts.tol);
    return from_quadrature(q, area);
  }

  // Horizontal subgroup: d^4 = (|w|^2 + rho^2)^2 + (x3 + A0 + <g, w>)^2 for
  // v = proj + w, where g is the in-subgroup gradient of the twist form.
  // |g| = 0 makes the condition radial (closed form); otherwise one scalar
  // direction carries the twist and the orthogonal complement stays radial.
  const Eigen::MatrixXd jmat = symplectic_matrix(n);
  const Eigen::VectorXd jt_x = jmat.transpose() * xp;
  Eigen::VectorXd g = Eigen::VectorXd::Zero(2 * n);
  for (const auto& b : sub.hbasis) g += b.dot(jt_x) * b;
  const double lambda = g.norm();
  const double a0 = g.dot(proj);  // A(x', proj), which vanishes when lambda does

  if (lambda <= 1e-13 * (1.0 + xp.norm())) {
    BallEstimate out;
    out.method = BallMethod::ClosedForm;
    const double vert = r4 - x3 * x3;
    if (vert > 0.0) {
      const double reach2 = std::sqrt(vert) - rho2;
      if (reach2 > 0.0)
        out.value = unit_ball_volume(kh) * std::pow(reach2, 0.5 * kh);
    }
    out.abs_error = 8.0 * std::numeric_limits<double>::epsilon() * out.value;
    out.evaluations = 1;
    return out;
  }

  // Window: |w1| <= sqrt(r^2 - rho^2) and |x3 + A0 + lambda w1| <= r^2.
  const double span = r * r - rho2;
  BallEstimate empty;
  empty.method = BallMethod::Quadrature;
  if (span <= 0.0) return empty;
  const double wmax = std::sqrt(span);
  const double c0 = x3 + a0;
  double lo = std::max(-wmax, (-r * r - c0) / lambda);
  double hi = std::min(wmax, (r * r - c0) / lambda);
  if (!(lo < hi)) return empty;

  if (kh == 1) {
    // One dimension: the in-ball set is a union of parameter intervals.
    const auto f = [&](double w1) {
      const double s2 = w1 * w1 + rho2;
      const double vert = c0 + lambda * w1;
      return s2 * s2 + vert * vert - r4;
    };
    const double pad = 1e-10 * (1.0 + hi - lo);
    return isolate_mass(f, lo - pad, hi + pad, opts.scan_points);
  }
  const double omega = unit_ball_volume(kh - 1);
  const auto reach2 = [&](double w1) {
    const double vert = c0 + lambda * w1;
    const double rem = r4 - vert * vert;
    if (rem <= 0.0) return -1.0;
    return std::sqrt(rem) - rho2 - w1 * w1;
  };
  // reach2 is concave on the window (sqrt of a concave parabola minus a
  // convex quadratic), so its positive set is a single interval; isolating
  // it puts the vanishing ends exactly at the quadrature window.
  const auto supported = nonpositive_intervals(
      [&](double w1) { return -reach2(w1); }, lo, hi, opts.scan_points);
  if (supported.empty()) return empty;
  const auto [wa, wb] = supported.front();
  if (!(wa < wb)) return empty;
  const auto f = [&](double w1) {
    const double rc = reach2(w1);
    return rc > 0.0 ? omega * std::pow(rc, 0.5 * (kh - 1)) : 0.0;
  };
  const double bound = omega * std::pow(r, kh - 1) * (wb - wa);
  const auto q = integrate_window(f, wa, wb, bound, opts.tol);
  return from_quadrature(q, 1.0);
}

// Radial mass of a ball around `a` for the Euclidean base of a heat product,
// integrated against the exact vertical section length.  beta2 is the squared
// distance of the center from the embedded copy of R^M inside the horizontal
// layer.
inline BallEstimate heat_ball(const HeatProductSpec& heat, const Point& x, double r,
                              const BallOptions& opts) {
  const int m = heat.base_dim;
  const Eigen::VectorXd a = x.coords.head(m);
  double beta2 = 0.0;
  for (int i = m; i < 2 * x.n(); ++i) beta2 += x.coords[i] * x.coords[i];
  const double r4 = r * r * r * r;
  const MeasureSpec& base = *heat.base;

  if (const auto* atomic = std::get_if<AtomicSpec>(&base.payload)) {
    BallEstimate out;
    out.method = BallMethod::ClosedForm;
    for (const auto& atom : atomic->atoms) {
      const double s2 = (atom.point.coords.head(m) - a).squaredNorm() + beta2;
      out.value += atom.weight * vertical_section(r4, s2);
    }
    out.abs_error = 8.0 * std::numeric_limits<double>::epsilon() * out.value;
    out.evaluations = static_cast<long>(atomic->atoms.size());
    return out;
  }

  if (const auto* sub = std::get_if<SubgroupHaarSpec>(&base.payload)) {
    // Euclidean subspace of dimension k: sections are radial around the
    // projection of a.
    std::vector<Eigen::VectorXd> basis;
    for (const auto& b : sub->hbasis) basis.push_back(pad_to(b, m));
    if (sub->vertical) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(m);
      e[m - 1] = 1.0;
      basis.push_back(std::move(e));
    }
    const int k = static_cast<int>(basis.size());
    Eigen::VectorXd proj = Eigen::VectorXd::Zero(m);
    for (const auto& b : basis) proj += b.dot(a) * b;
    const double rho2 = std::max(0.0, (a - proj).squaredNorm());
    const double span = r * r - rho2 - beta2;
    BallEstimate out;
    out.method = BallMethod::Quadrature;
    if (span <= 0.0) return out;
    const double mmax = std::sqrt(span);
    const auto f = [&](double s) {
      return std::pow(s, k - 1) * vertical_section(r4, s * s + rho2 + beta2);
    };
    const double bound = std::pow(mmax, k - 1) * 2.0 * r * r * mmax;
    const auto q = integrate_window(f, 0.0, mmax, bound, opts.tol);
    return from_quadrature(q, unit_sphere_area(k));
  }

  // Light-cone base: Monte Carlo over the cone graph, against exact vertical
  // sections (the only sampling dimensions are the cone parameters).
  const auto& surf = std::get<SurfaceSpec>(base.payload);
  const auto& cone = std::get<LightConePatch>(surf.family);
  const int nfree = cone.k - 4;
  std::vector<double> lo(3 + nfree), hi(3 + nfree);
  for (int i = 0; i < 3; ++i) {
    lo[i] = a[i] - r;
    hi[i] = a[i] + r;
  }
  for (int j = 0; j < nfree; ++j) {
    lo[3 + j] = a[4 + j] - r;
    hi[3 + j] = a[4 + j] + r;
  }
  BallEstimate total;
  total.method = BallMethod::MonteCarlo;
  for (int branch = 0; branch < 2; ++branch) {
    const double sigma = branch == 0 ? 1.0 : -1.0;
    const auto f = [&](const std::vector<double>& u) {
      Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
      y[0] = u[0];
      y[1] = u[1];
      y[2] = u[2];
      y[3] = sigma * std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
      for (int j = 0; j < nfree; ++j) y[4 + j] = u[3 + j];
      const double s2 = (y - a).squaredNorm() + beta2;
      return std::numbers::sqrt2 * surf.density * vertical_section(r4, s2);
    };
    accumulate(total, mc_box(lo, hi, f, opts.mc_samples / 2, opts.seed,
                             static_cast<std::uint64_t>(branch)));
  }
  return total;
}

}  // namespace detail

/// mu(B(x, r)) for the closed gauge ball, via the most exact route available
/// for the measure's kind (see the header comment).  Deterministic given
/// options; Monte Carlo appears only for light-cone families.
inline BallEstimate ball_measure(const MeasureSpec& mu, const Point& x, double r,
                                 const BallOptions& opts = {}) {
  detail::require_center(mu, x, r);
  return std::visit(
      [&](const auto& payload) -> BallEstimate {
        using T = std::decay_t<decltype(payload)>;
        if constexpr (std::is_same_v<T, AtomicSpec>) {
          return detail::atomic_ball(payload, x, r);
        } else if constexpr (std::is_same_v<T, CurveSpec>) {
          if (const auto* circ = std::get_if<CircleArcs>(&payload.family))
            return detail::circle_arcs_ball(*circ, payload.density, x, r, opts);
          if (const auto* lines = std::get_if<VerticalLines>(&payload.family))
            return detail::vertical_lines_ball(*lines, payload.density, x, r);
          if (const auto* hl = std::get_if<HorizontalLine>(&payload.family))
            return detail::horizontal_line_ball(*hl, payload.density, x, r, opts);
          return detail::lifted_circle_ball(std::get<LiftedCircle>(payload.family),
                                            payload.density, x, r, opts);
        } else if constexpr (std::is_same_v<T, SurfaceSpec>) {
          if (const auto* plane = std::get_if<VerticalPlane>(&payload.family))
            return detail::vertical_plane_ball(*plane, payload.density, x, r, opts);
          if (const auto* cyl = std::get_if<Cylinder>(&payload.family))
            return detail::cylinder_ball(*cyl, payload.density, x, r, opts);
          return detail::light_cone_ball(std::get<LightConePatch>(payload.family),
                                         payload.density, mu.n, x, r, opts);
        } else if constexpr (std::is_same_v<T, SubgroupHaarSpec>) {
          return detail::subgroup_ball(payload, mu.n, x, r, opts);
        } else if constexpr (std::is_same_v<T, HeatProductSpec>) {
          return detail::heat_ball(payload, x, r, opts);
        } else {
          static_assert(std::is_same_v<T, TransformedSpec>);
          BallEstimate inner = ball_measure(*payload.inner, payload.map.inverse()(x),
                                            r / payload.map.scale(), opts);
          inner.value *= payload.mass_scale;
          inner.abs_error *= payload.mass_scale;
          return inner;
        }
      },
      mu.payload);
}

namespace detail {

// Measure-weighted Monte Carlo references, used to cross-check the analytic
// paths.  Each family integrates its parameter density over a tight window,
// replacing the vertical fiber by its exact section length where one exists.

inline BallEstimate mc_curve(const CurveSpec& curve, const Point& x, double r,
                             const BallOptions& opts) {
  const double r4 = r * r * r * r;
  if (const auto* circ = std::get_if<CircleArcs>(&curve.family)) {
    BallEstimate total;
    total.method = BallMethod::MonteCarlo;
    std::uint64_t stream = 0;
    for (double h : circ->heights) {
      const auto f = [&](const std::vector<double>& u) {
        const Point p(circ->center[0] + circ->radius * std::cos(u[0]),
                      circ->center[1] + circ->radius * std::sin(u[0]), h);
        return dist4(x, p) <= r4 ? curve.density : 0.0;
      };
      accumulate(total, mc_box({0.0}, {2.0 * M_PI}, f,
                               opts.mc_samples / static_cast<long>(
                                                     circ->heights.size()),
                               opts.seed, stream++));
    }
    return total;
  }
  if (const auto* lines = std::get_if<VerticalLines>(&curve.family)) {
    const Eigen::VectorXd xp = x.coords.head(2);
    BallEstimate total;
    total.method = BallMethod::MonteCarlo;
    std::uint64_t stream = 0;
    for (const auto& c : lines->through) {
      // Exact center of the admissible t-window.
      Eigen::VectorXd cv(2);
      cv << c[0], c[1];
      const double t0 = x.coords[2] + symplectic_form(xp, cv);
      const auto f = [&](const std::vector<double>& u) {
        return dist4(x, Point(c[0], c[1], u[0])) <= r4 ? curve.density : 0.0;
      };
      accumulate(total,
                 mc_box({t0 - r * r}, {t0 + r * r}, f,
                        opts.mc_samples / static_cast<long>(lines->through.size()),
                        opts.seed, stream++));
    }
    return total;
  }
  if (const auto* hl = std::get_if<HorizontalLine>(&curve.family)) {
    const Point q = multiply(inverse(hl->base), x);
    const Eigen::Vector2d qxy(q.coords[0], q.coords[1]);
    const double along = qxy.dot(hl->direction);
    const auto f = [&](const std::vector<double>& u) {
      const Point p(u[0] * hl->direction[0], u[0] * hl->direction[1], 0.0);
      return dist4(q, p) <= r4 ? curve.density : 0.0;
    };
    return mc_box({along - r}, {along + r}, f, opts.mc_samples, opts.seed, 0);
  }
  const auto& lc = std::get<LiftedCircle>(curve.family);
  const auto f = [&](const std::vector<double>& u) {
    return dist4(x, lifted_circle_point(lc, u[0])) <= r4 ? 2.0 * M_PI * curve.density
                                                         : 0.0;
  };
  return mc_box({0.0}, {1.0}, f, opts.mc_samples, opts.seed, 0);
}

inline BallEstimate mc_surface(const SurfaceSpec& surf, int n, const Point& x, double r,
                               const BallOptions& opts) {
  const double r4 = r * r * r * r;
  if (const auto* plane = std::get_if<VerticalPlane>(&surf.family)) {
    const Eigen::Vector2d xy(x.coords[0], x.coords[1]);
    const double along = (xy - plane->origin).dot(plane->direction);
    const double rho2 =
        std::max(0.0, (xy - plane->origin).squaredNorm() - along * along);
    const auto f = [&](const std::vector<double>& u) {
      const double d = u[0] - along;
      return surf.density * vertical_section(r4, d * d + rho2);
    };
    return mc_box({along - r}, {along + r}, f, opts.mc_samples, opts.seed, 0);
  }
  if (const auto* cyl = std::get_if<Cylinder>(&surf.family)) {
    const Eigen::Vector2d xy(x.coords[0], x.coords[1]);
    const auto f = [&](const std::vector<double>& u) {
      const double dx = cyl->center[0] + cyl->radius * std::cos(u[0]) - xy[0];
      const double dy = cyl->center[1] + cyl->radius * std::sin(u[0]) - xy[1];
      return surf.density * vertical_section(r4, dx * dx + dy * dy);
    };
    return mc_box({0.0}, {2.0 * M_PI}, f, opts.mc_samples, opts.seed, 0);
  }
  return light_cone_ball(std::get<LightConePatch>(surf.family), surf.density, n, x, r,
                         opts);
}

inline BallEstimate mc_subgroup(const SubgroupHaarSpec& sub, int n, const Point& x,
                                double r, const BallOptions& opts) {
  const Eigen::VectorXd xp = x.coords.head(2 * n);
  const double r4 = r * r * r * r;
  const int kh = static_cast<int>(sub.hbasis.size());
  if (sub.vertical && kh == 0) return subgroup_ball(sub, n, x, r, opts);  // exact

  std::vector<double> center(kh), lo(kh), hi(kh);
  for (int i = 0; i < kh; ++i) {
    center[i] = sub.hbasis[i].dot(xp);
    lo[i] = center[i] - r;
    hi[i] = center[i] + r;
  }
  const auto horizontal_point = [&](const std::vector<double>& u) {
    Point p = Point::origin(n);
    for (int i = 0; i < kh; ++i) p.coords.head(2 * n) += u[i] * sub.hbasis[i];
    return p;
  };
  if (sub.vertical) {
    const auto f = [&](const std::vector<double>& u) {
      const Point p = horizontal_point(u);
      const double s2 = (p.coords.head(2 * n) - xp).squaredNorm();
      return vertical_section(r4, s2);
    };
    return mc_box(lo, hi, f, opts.mc_samples, opts.seed, 0);
  }
  const auto f = [&](const std::vector<double>& u) {
    return dist4(x, horizontal_point(u)) <= r4 ? 1.0 : 0.0;
  };
  return mc_box(lo, hi, f, opts.mc_samples, opts.seed, 0);
}

inline BallEstimate mc_heat(const HeatProductSpec& heat, const Point& x, double r,
                            const BallOptions& opts) {
  const int m = heat.base_dim;
  const Eigen::VectorXd a = x.coords.head(m);
  double beta2 = 0.0;
  for (int i = m; i < 2 * x.n(); ++i) beta2 += x.coords[i] * x.coords[i];
  const double r4 = r * r * r * r;
  const MeasureSpec& base = *heat.base;
  if (std::holds_alternative<AtomicSpec>(base.payload) ||
      std::holds_alternative<SurfaceSpec>(base.payload))
    return heat_ball(heat, x, r, opts);  // already exact-in-t or Monte Carlo

  const auto& sub = std::get<SubgroupHaarSpec>(base.payload);
  std::vector<Eigen::VectorXd> basis;
  for (const auto& b : sub.hbasis) basis.push_back(pad_to(b, m));
  if (sub.vertical) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(m);
    e[m - 1] = 1.0;
    basis.push_back(std::move(e));
  }
  const int k = static_cast<int>(basis.size());
  std::vector<double> lo(k), hi(k);
  for (int i = 0; i < k; ++i) {
    const double c = basis[i].dot(a);
    lo[i] = c - r;
    hi[i] = c + r;
  }
  const auto f = [&](const std::vector<double>& u) {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
    for (int i = 0; i < k; ++i) y += u[i] * basis[i];
    const double s2 = (y - a).squaredNorm() + beta2;
    return vertical_section(r4, s2);
  };
  return mc_box(lo, hi, f, opts.mc_samples, opts.seed, 0);
}

}  // namespace detail

/// Ball masses along an increasing radius grid (the growth profile of the
/// measure around x).  Mass monotonicity in r holds up to reported errors.
inline std::vector<BallEstimate> distance_profile(const MeasureSpec& mu, const Point& x,
                                                  const std::vector<double>& radii,
                                                  const BallOptions& opts = {}) {
  if (radii.empty()) throw std::invalid_argument("distance_profile: empty radius grid");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0) || !std::isfinite(radii[i]) ||
        (i > 0 && !(radii[i] > radii[i - 1])))
      throw std::invalid_argument("distance_profile: radii must be positive increasing");
  }
  std::vector<BallEstimate> out;
  out.reserve(radii.size());
  for (double r : radii) out.push_back(ball_measure(mu, x, r, opts));
  return out;
}

/// Monte Carlo reference for mu(B(x, r)): integrates the parameter density
/// over a tight window with stratified sampling, independent of the analytic
/// reductions in ball_measure (shared: only the exact vertical-section
/// identity).  Atoms and plain vertical subgroups fall back to exact
/// counting / closed form because there is nothing to sample.
inline BallEstimate ball_measure_mc(const MeasureSpec& mu, const Point& x, double r,
                                    const BallOptions& opts = {}) {
  detail::require_center(mu, x, r);
  return std::visit(
      [&](const auto& payload) -> BallEstimate {
        using T = std::decay_t<decltype(payload)>;
        if constexpr (std::is_same_v<T, AtomicSpec>) {
          return detail::atomic_ball(payload, x, r);
        } else if constexpr (std::is_same_v<T, CurveSpec>) {
          return detail::mc_curve(payload, x, r, opts);
        } else if constexpr (std::is_same_v<T, SurfaceSpec>) {
          return detail::mc_surface(payload, mu.n, x, r, opts);
        } else if constexpr (std::is_same_v<T, SubgroupHaarSpec>) {
          return detail::mc_subgroup(payload, mu.n, x, r, opts);
        } else if constexpr (std::is_same_v<T, HeatProductSpec>) {
          return detail::mc_heat(payload, x, r, opts);
        } else {
          static_assert(std::is_same_v<T, TransformedSpec>);
          BallEstimate inner = ball_measure_mc(*payload.inner, payload.map.inverse()(x),
                                               r / payload.map.scale(), opts);
          inner.value *= payload.mass_scale;
          inner.abs_error *= payload.mass_scale;
          return inner;
        }
      },
      mu.payload);
}

}  // namespace koranyi
