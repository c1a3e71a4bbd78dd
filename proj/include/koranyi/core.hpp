#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

// Core geometry of the Heisenberg group H^n = R^{2n+1} with the Koranyi
// gauge metric.  Conventions used throughout the library:
//
//   * group law      x * y = (x' + y', x_{2n+1} + y_{2n+1} + A(x', y'))
//   * symplectic A   A(x', y') = -2 sum_j (x_j y_{j+n} - x_{j+n} y_j)
//   * gauge norm     |x| = (|x'|^4 + x_{2n+1}^2)^(1/4)
//   * distance       d(x, y) = |x^{-1} * y|   (left invariant)
//   * dilation       delta_r(x) = (r x', r^2 x_{2n+1}),  d-homogeneous
//
// Primed vectors are the first 2n ("horizontal") coordinates.

namespace koranyi {

inline constexpr const char* library_version = "0.1.0";

/// Homogeneous dimension of H^n: the growth exponent of Haar measure.
inline constexpr int homogeneous_dimension(int n) { return 2 * n + 2; }

/// A point of H^n stored as its 2n+1 coordinates. n is implicit in the size.
struct Point {
  Eigen::VectorXd coords;

  Point() = default;

  explicit Point(Eigen::VectorXd c) : coords(std::move(c)) {
    if (coords.size() < 3 || coords.size() % 2 == 0)
      throw std::invalid_argument("Point: coordinate count must be odd and >= 3");
    if (!coords.allFinite())
      throw std::invalid_argument("Point: coordinates must be finite");
  }

  /// H^1 convenience.
  Point(double x1, double x2, double x3) : coords(3) { coords << x1, x2, x3; }

  static Point origin(int n) {
    if (n < 1) throw std::invalid_argument("Point::origin: n must be >= 1");
    Point p;
    p.coords = Eigen::VectorXd::Zero(2 * n + 1);
    return p;
  }

  int n() const { return static_cast<int>((coords.size() - 1) / 2); }
  int dim() const { return static_cast<int>(coords.size()); }
  double vertical() const { return coords[coords.size() - 1]; }
  Eigen::VectorXd horizontal() const { return coords.head(coords.size() - 1); }
};

namespace detail {
inline void require_same_group(const Point& x, const Point& y, const char* who) {
  if (x.coords.size() != y.coords.size())
    throw std::invalid_argument(std::string(who) + ": points from different groups");
}
}  // namespace detail

/// Standard symplectic form scaled by -2, on horizontal vectors of length 2n.
inline double symplectic_form(const Eigen::VectorXd& xp, const Eigen::VectorXd& yp) {
  if (xp.size() != yp.size() || xp.size() % 2 != 0 || xp.size() < 2)
    throw std::invalid_argument("symplectic_form: need two vectors of equal even length");
  const auto n = xp.size() / 2;
  double s = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) s += xp[j] * yp[j + n] - xp[j + n] * yp[j];
  return -2.0 * s;
}

inline Point multiply(const Point& x, const Point& y) {
  detail::require_same_group(x, y, "multiply");
  const Eigen::Index m = x.coords.size() - 1;
  Point z;
  z.coords.resize(m + 1);
  z.coords.head(m) = x.coords.head(m) + y.coords.head(m);
  z.coords[m] = x.coords[m] + y.coords[m] +
                symplectic_form(x.coords.head(m), y.coords.head(m));
  return z;
}

/// Group inverse; coordinate negation because A is antisymmetric.
inline Point inverse(const Point& x) {
  Point z;
  z.coords = -x.coords;
  return z;
}

/// Anisotropic dilation delta_r: horizontal slots scale by r, vertical by r^2.
inline Point dilate(double r, const Point& x) {
  if (!(r > 0.0) || !std::isfinite(r))
    throw std::invalid_argument("dilate: scale must be positive and finite");
  const Eigen::Index m = x.coords.size() - 1;
  Point z;
  z.coords.resize(m + 1);
  z.coords.head(m) = r * x.coords.head(m);
  z.coords[m] = r * r * x.coords[m];
  return z;
}

/// Fourth power of d(x, y), computed without temporaries. This is the hot
/// primitive of the whole library; everything metric funnels through it.
inline double dist4(const Point& x, const Point& y) {
  detail::require_same_group(x, y, "dist4");
  const double* a = x.coords.data();
  const double* b = y.coords.data();
  const int n = x.n();
  double q = 0.0;
  for (int i = 0; i < 2 * n; ++i) {
    const double d = b[i] - a[i];
    q += d * d;
  }
  // vertical part of x^{-1} * y:  y3 - x3 - A(x', y')
  double twist = 0.0;
  for (int j = 0; j < n; ++j) twist += a[j] * b[j + n] - a[j + n] * b[j];
  const double z3 = b[2 * n] - a[2 * n] + 2.0 * twist;
  return q * q + z3 * z3;
}

/// Fourth power of the gauge norm.
inline double koranyi_norm4(const Point& x) {
  const Eigen::Index m = x.coords.size() - 1;
  const double q = x.coords.head(m).squaredNorm();
  return q * q + x.coords[m] * x.coords[m];
}

inline double koranyi_norm(const Point& x) {
  return std::sqrt(std::sqrt(koranyi_norm4(x)));
}

inline double dist_h(const Point& x, const Point& y) {
  return std::sqrt(std::sqrt(dist4(x, y)));
}

/// Metric (|x'-y'|^4 + (x_m - y_m)^2)^(1/4) on R^m; the last coordinate is
/// the distinguished one.  Isometric to a subgroup of H^{m-1}, see embed_w.
inline double heat_dist(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("heat_dist: need two vectors of equal length >= 2");
  const Eigen::Index m = x.size() - 1;
  const double q = (x.head(m) - y.head(m)).squaredNorm();
  const double dv = x[m] - y[m];
  return std::sqrt(std::sqrt(q * q + dv * dv));
}

/// Isometry of (R^{n+1}, heat_dist) onto the subgroup {(x_1..x_n, 0.., t)}
/// of H^n: the first n slots land in isotropic horizontal directions, so the
/// symplectic correction vanishes identically along the image.
inline Point embed_w(const Eigen::VectorXd& x) {
  if (x.size() < 2)
    throw std::invalid_argument("embed_w: need a vector of length >= 2");
  const Eigen::Index n = x.size() - 1;
  Point p;
  p.coords = Eigen::VectorXd::Zero(2 * n + 1);
  p.coords.head(n) = x.head(n);
  p.coords[2 * n] = x[n];
  return p;
}

/// The canonical reflection: negates x_1..x_n and the vertical coordinate.
/// Anti-symplectic on the horizontal layer, hence a group automorphism, and
/// it clearly preserves the gauge norm.
inline Point reflect_point(const Point& x) {
  const int n = x.n();
  Point z = x;
  z.coords.head(n) *= -1.0;
  z.coords[2 * n] *= -1.0;
  return z;
}

namespace detail {
/// Matrix of the form A on R^{2n} (so A(x,y) = x^T J y).
inline Eigen::MatrixXd symplectic_matrix(int n) {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  j.topRightCorner(n, n) = -2.0 * Eigen::MatrixXd::Identity(n, n);
  j.bottomLeftCorner(n, n) = 2.0 * Eigen::MatrixXd::Identity(n, n);
  return j;
}

inline constexpr double rotation_check_tol = 1e-10;

/// Conjugate a horizontal matrix by the reflection diag(-I_n, I_n).
inline Eigen::MatrixXd reflect_conjugate(const Eigen::MatrixXd& u) {
  const Eigen::Index n = u.rows() / 2;
  Eigen::MatrixXd v = u;
  v.topRightCorner(n, n) *= -1.0;
  v.bottomLeftCorner(n, n) *= -1.0;
  return v;
}
}  // namespace detail

/// True when u is orthogonal and preserves the symplectic form, i.e. the
/// horizontal action of a rotation isometry (unitary in complex coordinates
/// z_j = x_j + i x_{j+n}).
inline bool is_valid_rotation(const Eigen::MatrixXd& u) {
  if (u.rows() != u.cols() || u.rows() % 2 != 0 || u.rows() < 2) return false;
  const int n = static_cast<int>(u.rows() / 2);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2 * n, 2 * n);
  if (((u.transpose() * u) - id).cwiseAbs().maxCoeff() > detail::rotation_check_tol)
    return false;
  const Eigen::MatrixXd j = detail::symplectic_matrix(n);
  return ((u.transpose() * j * u) - j).cwiseAbs().maxCoeff() <=
         detail::rotation_check_tol;
}

/// Rotation by `angle` of every complex horizontal coordinate; for n = 1 this
/// is the full rotation group about the vertical axis.
inline Eigen::MatrixXd vertical_axis_rotation(int n, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  u.topLeftCorner(n, n) = c * Eigen::MatrixXd::Identity(n, n);
  u.topRightCorner(n, n) = -s * Eigen::MatrixXd::Identity(n, n);
  u.bottomLeftCorner(n, n) = s * Eigen::MatrixXd::Identity(n, n);
  u.bottomRightCorner(n, n) = c * Eigen::MatrixXd::Identity(n, n);
  return u;
}

/// Orientation-aware similarity of H^n in the normal form
///
///   S(p) = q * delta_r( rho^eps( U p ) )
///
/// applied in the order rotate, reflect, dilate, translate.  U is a rotation
/// (orthogonal + symplectic), rho the canonical reflection, r > 0 the metric
/// scale factor: d(Sx, Sy) = r d(x, y).
class Similarity {
 public:
  Similarity(Point translation, Eigen::MatrixXd rotation, bool reflect, double scale)
      : translation_(std::move(translation)),
        rotation_(std::move(rotation)),
        reflect_(reflect),
        scale_(scale) {
    const int n = translation_.n();
    if (rotation_.rows() != 2 * n || rotation_.cols() != 2 * n)
      throw std::invalid_argument("Similarity: rotation block must be 2n x 2n");
    if (!(scale_ > 0.0) || !std::isfinite(scale_))
      throw std::invalid_argument("Similarity: scale must be positive and finite");
    if (!is_valid_rotation(rotation_))
      throw std::invalid_argument(
          "Similarity: rotation must be orthogonal and preserve the symplectic form");
  }

  static Similarity identity(int n) {
    return Similarity(Point::origin(n), Eigen::MatrixXd::Identity(2 * n, 2 * n),
                      false, 1.0);
  }
  static Similarity translation(const Point& q) {
    const int n = q.n();
    return Similarity(q, Eigen::MatrixXd::Identity(2 * n, 2 * n), false, 1.0);
  }
  static Similarity dilation(int n, double r) {
    return Similarity(Point::origin(n), Eigen::MatrixXd::Identity(2 * n, 2 * n),
                      false, r);
  }
  static Similarity rotation(const Eigen::MatrixXd& u) {
    const int n = static_cast<int>(u.rows() / 2);
    return Similarity(Point::origin(n), u, false, 1.0);
  }
  static Similarity reflection(int n) {
    return Similarity(Point::origin(n), Eigen::MatrixXd::Identity(2 * n, 2 * n),
                      true, 1.0);
  }

  int n() const { return translation_.n(); }
  const Point& translation_part() const { return translation_; }
  const Eigen::MatrixXd& rotation_part() const { return rotation_; }
  bool reflect_part() const { return reflect_; }
  double scale() const { return scale_; }
  bool is_isometry() const { return scale_ == 1.0; }

  Point operator()(const Point& p) const {
    detail::require_same_group(p, translation_, "Similarity::apply");
    const int n = p.n();
    Point z;
    z.coords.resize(2 * n + 1);
    z.coords.head(2 * n) = rotation_ * p.coords.head(2 * n);
    z.coords[2 * n] = p.coords[2 * n];
    if (reflect_) z = reflect_point(z);
    z = dilate(scale_, z);
    return multiply(translation_, z);
  }

  /// The map y -> this^{-1}(y), renormalized.  The automorphism part of the
  /// inverse is delta_{1/r} rho^eps (rho^eps U^T rho^eps); conjugating the
  /// transposed rotation by the reflection keeps it symplectic.
  Similarity inverse() const {
    Eigen::MatrixXd u = rotation_.transpose();
    if (reflect_) u = detail::reflect_conjugate(u);
    Similarity linear(Point::origin(n()), u, reflect_, 1.0 / scale_);
    Point q = linear(koranyi::inverse(translation_));
    return Similarity(q, u, reflect_, 1.0 / scale_);
  }

 private:
  Point translation_;
  Eigen::MatrixXd rotation_;
  bool reflect_;
  double scale_;
};

/// Composition outer(inner(p)), renormalized into the standard form.  The
/// combined rotation is (rho^e1 U2 rho^e1) U1 with e1 = inner reflection,
/// because pushing a reflection across a rotation conjugates the rotation.
inline Similarity compose(const Similarity& outer, const Similarity& inner) {
  if (outer.n() != inner.n())
    throw std::invalid_argument("compose: similarities from different groups");
  Eigen::MatrixXd u2 = outer.rotation_part();
  if (inner.reflect_part()) u2 = detail::reflect_conjugate(u2);
  Similarity out(outer(inner.translation_part()), u2 * inner.rotation_part(),
                 outer.reflect_part() != inner.reflect_part(),
                 outer.scale() * inner.scale());
  return out;
}

inline Point apply_similarity(const Similarity& s, const Point& p) { return s(p); }

}  // namespace koranyi
