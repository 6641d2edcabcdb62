#pragma once

#include "isop/core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

namespace isop {

/// A point of E^d (plain coordinates), S^d (unit vector in R^{d+1}) or
/// H^d (upper hyperboloid sheet, time coordinate first).
class Point {
 public:
  Point() = default;

  /// Validates that `x` lies on the model within tol::model.
  Point(Geometry g, Vec x) : g_(g), x_(std::move(x)) {
    require(x_.size() == g_.ambient_dim(), Errc::invalid_input,
            "point has " + std::to_string(x_.size()) + " coordinates, " + geometry_name(g_) +
                " needs " + std::to_string(g_.ambient_dim()));
    require(x_.allFinite(), Errc::invalid_input, "point has non-finite coordinates");
    if (g_.is_spherical()) {
      require(std::abs(x_.norm() - 1.0) <= tol::model, Errc::invalid_input,
              "spherical point is not a unit vector");
    } else if (g_.is_hyperbolic()) {
      const double scale = std::max(1.0, x_[0] * x_[0]);
      require(x_[0] > 0 && std::abs(minkowski(x_, x_) + 1.0) <= tol::model * scale,
              Errc::invalid_input, "hyperbolic point is off the upper hyperboloid sheet");
    }
  }

  /// Pushes approximate coordinates onto the model instead of rejecting them.
  static Point projected(Geometry g, Vec x) {
    if (g.is_spherical()) {
      const double n = x.norm();
      require(n > 0, Errc::degenerate, "cannot normalize zero vector onto the sphere");
      x /= n;
    } else if (g.is_hyperbolic()) {
      x[0] = std::sqrt(1.0 + x.tail(x.size() - 1).squaredNorm());
    }
    return Point(g, std::move(x));
  }

  const Geometry& geometry() const { return g_; }
  const Vec& coords() const { return x_; }
  double operator[](int i) const { return x_[i]; }

 private:
  Geometry g_;
  Vec x_;
};

inline void require_same(const Geometry& a, const Geometry& b) {
  require(a == b, Errc::geometry_mismatch, geometry_name(a) + " vs " + geometry_name(b));
}

inline Point basepoint(Geometry g) {
  Vec x = Vec::Zero(g.ambient_dim());
  if (!g.is_euclidean()) x[0] = 1.0;
  return Point(g, x);
}

/// Exponential map at the basepoint; `v` is a tangent vector in R^d.
inline Point exp_base(Geometry g, const Vec& v) {
  require(v.size() == g.dim, Errc::invalid_input, "tangent vector has wrong length");
  if (g.is_euclidean()) return Point(g, v);
  const double t = v.norm();
  Vec x(g.dim + 1);
  if (g.is_spherical()) {
    x[0] = std::cos(t);
    x.tail(g.dim) = t > 0 ? Vec(v * (std::sin(t) / t)) : Vec(Vec::Zero(g.dim));
  } else {
    x[0] = std::cosh(t);
    x.tail(g.dim) = t > 0 ? Vec(v * (std::sinh(t) / t)) : Vec(Vec::Zero(g.dim));
  }
  return Point::projected(g, x);
}

/// Inverse of exp_base.
inline Vec log_base(const Point& p) {
  const Geometry& g = p.geometry();
  if (g.is_euclidean()) return p.coords();
  Vec s = p.coords().tail(g.dim);
  const double n = s.norm();
  if (n == 0) return Vec::Zero(g.dim);
  const double t = g.is_spherical() ? std::atan2(n, p[0]) : std::asinh(n);
  return s * (t / n);
}

/// Geodesic distance. Uses the chord forms 2 atan2 and 2 asinh, which are
/// equivalent to acos<p,q> and acosh(-<p,q>) but keep full relative
/// precision for nearby points.
inline double distance(const Point& p, const Point& q) {
  require_same(p.geometry(), q.geometry());
  const Vec& a = p.coords();
  const Vec& b = q.coords();
  switch (p.geometry().space) {
    case Space::euclidean:
      return (a - b).norm();
    case Space::spherical: {
      const double plus = (a + b).norm();
      require(plus > tol::domain, Errc::antipodal, "distance between antipodal points");
      return 2.0 * std::atan2((a - b).norm(), plus);
    }
    case Space::hyperbolic: {
      const Vec diff = a - b;
      const double q2 = std::max(0.0, minkowski(diff, diff));
      return 2.0 * std::asinh(0.5 * std::sqrt(q2));
    }
  }
  return 0;
}

inline Point midpoint(const Point& p, const Point& q) {
  require_same(p.geometry(), q.geometry());
  const Geometry& g = p.geometry();
  const Vec s = p.coords() + q.coords();
  if (g.is_euclidean()) return Point(g, 0.5 * s);
  if (g.is_spherical()) {
    require(s.norm() > tol::domain, Errc::antipodal, "midpoint of antipodal points");
    return Point(g, s / s.norm());
  }
  return Point::projected(g, s / std::sqrt(-minkowski(s, s)));
}

/// Point at distance `t` from `p` along the geodesic towards `q`.
inline Point point_toward(const Point& p, const Point& q, double t) {
  require_same(p.geometry(), q.geometry());
  const Geometry& g = p.geometry();
  const Vec& a = p.coords();
  const Vec& b = q.coords();
  if (g.is_euclidean()) {
    const double n = (b - a).norm();
    require(n > 0, Errc::degenerate, "direction between coincident points");
    return Point(g, a + (b - a) * (t / n));
  }
  if (g.is_spherical()) {
    Vec v = b - a.dot(b) * a;
    const double n = v.norm();
    require(n > tol::domain, Errc::degenerate, "direction between coincident or antipodal points");
    return Point::projected(g, std::cos(t) * a + std::sin(t) * (v / n));
  }
  Vec v = b + minkowski(a, b) * a;
  const double n2 = minkowski(v, v);
  require(n2 > 0, Errc::degenerate, "direction between coincident points");
  return Point::projected(g, std::cosh(t) * a + std::sinh(t) * (v / std::sqrt(n2)));
}

/// Totally geodesic hypersurface with unit normal. In E^d it is
/// {x : <u,x> = offset}; in S^d and H^d it is u-perp through the origin of the
/// ambient space with <u,u> = 1 (Minkowski in H^d), offset unused.
struct Hyperplane {
  Geometry geometry;
  Vec normal;
  double offset = 0.0;

  /// Signed distance; positive on the side `normal` points to.
  double signed_distance(const Point& p) const {
    require_same(geometry, p.geometry());
    const Vec& x = p.coords();
    switch (geometry.space) {
      case Space::euclidean: return normal.dot(x) - offset;
      case Space::spherical: return std::asin(std::clamp(normal.dot(x), -1.0, 1.0));
      case Space::hyperbolic: return std::asinh(minkowski(x, normal));
    }
    return 0;
  }

  /// Linear functional on lifted coordinates with the same zero set and sign.
  Vec functional() const {
    if (geometry.is_euclidean()) {
      Vec f(geometry.dim + 1);
      f[0] = -offset;
      f.tail(geometry.dim) = normal;
      return f;
    }
    if (geometry.is_spherical()) return normal;
    return flip_time(normal);
  }

  Hyperplane flipped() const { return {geometry, -normal, -offset}; }
};

/// Lifted coordinates: (1, x) in E^d, the ambient vector otherwise. Convex
/// position in the geometry is conic position of the lifts.
inline Vec lift(const Point& p) {
  const Geometry& g = p.geometry();
  if (!g.is_euclidean()) return p.coords();
  Vec l(g.dim + 1);
  l[0] = 1.0;
  l.tail(g.dim) = p.coords();
  return l;
}

/// Inverse of lift up to positive scale.
inline Point point_from_lift(Geometry g, const Vec& l) {
  if (g.is_euclidean()) {
    require(l[0] > tol::domain * l.norm(), Errc::degenerate, "lifted vector at infinity");
    return Point(g, l.tail(g.dim) / l[0]);
  }
  if (g.is_spherical()) {
    require(l.norm() > 0, Errc::degenerate, "zero lifted vector");
    return Point(g, l / l.norm());
  }
  const double q = -minkowski(l, l);
  require(q > 0 && l[0] > 0, Errc::degenerate, "lifted vector is not future timelike");
  return Point::projected(g, l / std::sqrt(q));
}

/// Hyperplane {f . lift(x) = 0}, oriented so that positive f is positive
/// signed distance.
inline Hyperplane hyperplane_from_functional(Geometry g, const Vec& f) {
  if (g.is_euclidean()) {
    const Vec s = f.tail(g.dim);
    const double n = s.norm();
    require(n > 0, Errc::degenerate, "functional has no spatial part");
    return {g, s / n, -f[0] / n};
  }
  if (g.is_spherical()) return {g, f / f.norm(), 0.0};
  Vec u = flip_time(f);
  const double n2 = minkowski(u, u);
  require(n2 > 0, Errc::degenerate, "hyperplane does not meet the hyperboloid");
  return {g, u / std::sqrt(n2), 0.0};
}

/// Perpendicular bisector of [p, q]; `q` lies on the positive side.
inline Hyperplane bisector(const Point& p, const Point& q) {
  require_same(p.geometry(), q.geometry());
  const Geometry& g = p.geometry();
  const Vec d = q.coords() - p.coords();
  if (g.is_euclidean()) {
    const double n = d.norm();
    require(n > 0, Errc::degenerate, "bisector of coincident points");
    const Vec u = d / n;
    return {g, u, u.dot(0.5 * (p.coords() + q.coords()))};
  }
  if (g.is_spherical()) {
    const double n = d.norm();
    require(n > 0, Errc::degenerate, "bisector of coincident points");
    require((p.coords() + q.coords()).norm() > tol::domain, Errc::antipodal,
            "bisector of antipodal points");
    return {g, d / n, 0.0};
  }
  const double n2 = minkowski(d, d);
  require(n2 > 0, Errc::degenerate, "bisector of coincident points");
  return {g, d / std::sqrt(n2), 0.0};
}

inline double point_hyperplane_distance(const Point& p, const Hyperplane& h) {
  return h.signed_distance(p);
}

inline Point reflect(const Hyperplane& h, const Point& p) {
  require_same(h.geometry, p.geometry());
  const Vec& x = p.coords();
  switch (h.geometry.space) {
    case Space::euclidean:
      return Point(h.geometry, x - 2.0 * (h.normal.dot(x) - h.offset) * h.normal);
    case Space::spherical:
      return Point::projected(h.geometry, x - 2.0 * h.normal.dot(x) * h.normal);
    case Space::hyperbolic:
      return Point::projected(h.geometry, x - 2.0 * minkowski(x, h.normal) * h.normal);
  }
  return p;
}

/// Foot of the perpendicular from `p` to `h`. In S^d the poles +-normal have
/// no unique foot and raise Errc::pole.
inline Point project_orthogonal(const Hyperplane& h, const Point& p) {
  require_same(h.geometry, p.geometry());
  const Vec& x = p.coords();
  switch (h.geometry.space) {
    case Space::euclidean:
      return Point(h.geometry, x - (h.normal.dot(x) - h.offset) * h.normal);
    case Space::spherical: {
      const Vec y = x - h.normal.dot(x) * h.normal;
      require(y.norm() > tol::domain, Errc::pole, "orthogonal projection of a pole");
      return Point(h.geometry, y / y.norm());
    }
    case Space::hyperbolic: {
      const Vec y = x - minkowski(x, h.normal) * h.normal;
      return Point::projected(h.geometry, y / std::sqrt(-minkowski(y, y)));
    }
  }
  return p;
}

/// Geodesic through two points, used as the axis of a hypercycle fibration.
struct Line {
  Point a;
  Point b;
};

namespace detail {

/// Point m of the axis plane span(a, b) lying on h, normalized onto H^d.
/// Fails unless the axis is perpendicular to h.
inline Vec axis_foot(const Hyperplane& h, const Line& axis) {
  const Vec& a = axis.a.coords();
  const Vec& b = axis.b.coords();
  const Vec& u = h.normal;
  Mat span(a.size(), 2);
  span << a, b;
  const Vec coef = span.colPivHouseholderQr().solve(u);
  const double resid = (span * coef - u).norm() / u.norm();
  require(resid <= 1e-9, Errc::hypothesis, "axis is not perpendicular to the hyperplane");
  Vec m = minkowski(b, u) * a - minkowski(a, u) * b;
  const double q = -minkowski(m, m);
  require(q > 0, Errc::degenerate, "axis does not meet the hyperplane");
  m /= std::sqrt(q);
  if (m[0] < 0) m = -m;
  return m;
}

}  // namespace detail

/// Projection of `p` onto `h` along the hypercycle equidistant from the
/// geodesic `axis`, which must be perpendicular to `h`. Points of the axis go
/// to its foot m; points of `h` are fixed.
inline Point project_g_orthogonal(const Hyperplane& h, const Line& axis, const Point& p) {
  require(h.geometry.is_hyperbolic(), Errc::geometry_mismatch,
          "g-orthogonal projection is defined in H^d only");
  require_same(h.geometry, p.geometry());
  const Vec m = detail::axis_foot(h, axis);
  const Vec& x = p.coords();
  const Vec w = x + minkowski(x, m) * m - minkowski(x, h.normal) * h.normal;
  const double ww = std::max(0.0, minkowski(w, w));
  return Point::projected(h.geometry, std::sqrt(1.0 + ww) * m + w);
}

/// Signed hypercycle parameter of `p` along the fibration of project_g_orthogonal:
/// the arc-length coordinate t with x = cosh(delta) cosh(t) m + cosh(delta) sinh(t) u + ...
inline double hypercycle_parameter(const Hyperplane& h, const Line& axis, const Point& p) {
  const Vec m = detail::axis_foot(h, axis);
  const Vec& x = p.coords();
  const Vec w = x + minkowski(x, m) * m - minkowski(x, h.normal) * h.normal;
  const double cosh_delta = std::sqrt(1.0 + std::max(0.0, minkowski(w, w)));
  return std::asinh(minkowski(x, h.normal) / cosh_delta);
}

/// Affine (E^d) or linear ambient (S^d, H^d) isometry x -> A x + b.
struct Isometry {
  Geometry geometry;
  Mat linear;
  Vec shift;

  static Isometry identity(Geometry g) {
    return {g, Mat::Identity(g.ambient_dim(), g.ambient_dim()), Vec::Zero(g.ambient_dim())};
  }

  Point apply(const Point& p) const {
    require_same(geometry, p.geometry());
    return Point::projected(geometry, linear * p.coords() + shift);
  }

  Vec apply_vector(const Vec& x) const { return linear * x + shift; }

  Isometry inverse() const {
    if (geometry.is_euclidean()) {
      const Mat inv = linear.transpose();
      return {geometry, inv, -(inv * shift)};
    }
    if (geometry.is_spherical()) return {geometry, linear.transpose(), shift};
    const Eigen::VectorXd j = flip_time(Vec::Ones(geometry.dim + 1));
    return {geometry, j.asDiagonal() * linear.transpose() * j.asDiagonal(), shift};
  }

  Isometry then(const Isometry& next) const {
    return {geometry, next.linear * linear, next.linear * shift + next.shift};
  }
};

/// Transvection along the geodesic from the basepoint through exp_base(v),
/// moving the basepoint to exp_base(v).
inline Isometry translation(Geometry g, const Vec& v) {
  Isometry iso = Isometry::identity(g);
  if (g.is_euclidean()) {
    iso.shift = v;
    return iso;
  }
  const double t = v.norm();
  if (t == 0) return iso;
  Vec e = Vec::Zero(g.dim + 1);
  e.tail(g.dim) = v / t;
  Vec e0 = Vec::Zero(g.dim + 1);
  e0[0] = 1.0;
  if (g.is_spherical()) {
    iso.linear += std::sin(t) * (e * e0.transpose() - e0 * e.transpose()) +
                  (std::cos(t) - 1.0) * (e0 * e0.transpose() + e * e.transpose());
  } else {
    iso.linear += std::sinh(t) * (e * e0.transpose() + e0 * e.transpose()) +
                  (std::cosh(t) - 1.0) * (e0 * e0.transpose() + e * e.transpose());
  }
  return iso;
}

/// Isometry sending `c` to the basepoint by the inverse transvection.
inline Isometry to_basepoint(const Point& c) {
  return translation(c.geometry(), log_base(c)).inverse();
}

/// Klein chart of H^d, gnomonic chart of S^d, identity chart of E^d, each
/// centred at a point that is first moved to the basepoint.
class Chart {
 public:
  explicit Chart(Geometry g) : g_(g), to_base_(Isometry::identity(g)), from_base_(to_base_) {}
  explicit Chart(const Point& center)
      : g_(center.geometry()), to_base_(to_basepoint(center)), from_base_(to_base_.inverse()) {}

  const Geometry& geometry() const { return g_; }

  Vec to_chart(const Point& p) const {
    require_same(g_, p.geometry());
    const Vec x = to_base_.apply_vector(p.coords());
    if (g_.is_euclidean()) return x;
    require(x[0] > tol::domain, Errc::pole, "point outside the chart hemisphere");
    return x.tail(g_.dim) / x[0];
  }

  Point from_chart(const Vec& y) const {
    require(y.size() == g_.dim, Errc::invalid_input, "chart vector has wrong length");
    if (g_.is_euclidean()) return Point(g_, from_base_.apply_vector(y));
    Vec x(g_.dim + 1);
    x[0] = 1.0;
    x.tail(g_.dim) = y;
    if (g_.is_spherical()) {
      x /= x.norm();
    } else {
      const double q = 1.0 - y.squaredNorm();
      require(q > 0, Errc::invalid_input, "Klein chart vector outside the unit ball");
      x /= std::sqrt(q);
    }
    return Point::projected(g_, from_base_.apply_vector(x));
  }

  /// Lifted vector (1, y) mapped back to the model's ambient frame, up to scale.
  Vec chart_lift(const Vec& y) const {
    Vec x(g_.dim + 1);
    x[0] = 1.0;
    x.tail(g_.dim) = y;
    if (g_.is_euclidean()) {
      x.tail(g_.dim) = from_base_.apply_vector(y);
      return x;
    }
    return from_base_.linear * x;
  }

  /// Riemannian volume element in chart coordinates.
  double density(const Vec& y) const {
    const double e = 0.5 * (g_.dim + 1);
    switch (g_.space) {
      case Space::euclidean: return 1.0;
      case Space::spherical: return std::pow(1.0 + y.squaredNorm(), -e);
      case Space::hyperbolic: {
        const double q = 1.0 - y.squaredNorm();
        return q > 0 ? std::pow(q, -e) : 0.0;
      }
    }
    return 0;
  }

 private:
  Geometry g_;
  Isometry to_base_;
  Isometry from_base_;
};

inline Vec chart(const Point& p) { return Chart(p.geometry()).to_chart(p); }
inline Point unchart(Geometry g, const Vec& y) { return Chart(g).from_chart(y); }

}  // namespace isop
