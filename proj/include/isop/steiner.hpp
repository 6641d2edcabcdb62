#pragma once

#include "isop/linalg.hpp"
#include "isop/polytope.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <vector>

namespace isop {

/// Vertex images under the edge symmetrization of P along [v_i, v_j], in the
/// original vertex order: v_i and v_j stay, every other vertex goes to its
/// projection onto the bisector (orthogonal in E^d and S^d, g-orthogonal with
/// the edge line as axis in H^d). Checks the hyperplane hypothesis and, in
/// S^d, that P avoids the poles of the bisector.
inline std::vector<Point> steiner_points(const Polytope& P, int i, int j) {
  const Geometry& g = P.geometry();
  require(i != j && i >= 0 && j >= 0 && i < P.size() && j < P.size(), Errc::invalid_input,
          "edge needs two distinct vertex indices");
  separating_hyperplane_through_rest(P, i, j);
  const Hyperplane h = bisector(P.vertex(i), P.vertex(j));
  if (g.is_spherical()) {
    for (double s : {1.0, -1.0}) {
      const Point pole(g, s * h.normal);
      require(!P.contains(pole, -1e-9), Errc::pole, "polytope contains a pole of the bisector");
    }
  }
  const Line axis{P.vertex(i), P.vertex(j)};
  std::vector<Point> out;
  for (int k = 0; k < P.size(); ++k) {
    if (k == i || k == j) {
      out.push_back(P.vertex(k));
    } else if (g.is_hyperbolic()) {
      out.push_back(project_g_orthogonal(h, axis, P.vertex(k)));
    } else {
      out.push_back(project_orthogonal(h, P.vertex(k)));
    }
  }
  return out;
}

/// conv([p1, p2] u {pi(p3), ...}); in E^d this is the Steiner symmetral.
inline Polytope steiner_euclidean(const Polytope& P, int i, int j) {
  require(P.geometry().is_euclidean(), Errc::geometry_mismatch, "Euclidean symmetrization needs E^d");
  return Polytope::hull_of(steiner_points(P, i, j));
}

/// Bounding polytope of the hyperbolic symmetral with axis the edge line.
inline Polytope steiner_hyperbolic_bound(const Polytope& P, int i, int j) {
  require(P.geometry().is_hyperbolic(), Errc::geometry_mismatch, "needs H^d");
  return Polytope::hull_of(steiner_points(P, i, j));
}

/// Bounding polytope of the spherical symmetral.
inline Polytope steiner_spherical_bound(const Polytope& P, int i, int j) {
  require(P.geometry().is_spherical(), Errc::geometry_mismatch, "needs S^d");
  return Polytope::hull_of(steiner_points(P, i, j));
}

/// Dispatches to the operator of P's geometry.
inline Polytope steiner_bound(const Polytope& P, int i, int j) {
  return Polytope::hull_of(steiner_points(P, i, j));
}

/// (k-1)-volume of conv{p_i + lambda_i t v} for k <= d+1 points; zero when
/// the points are affinely dependent.
inline double shadow_volume(const std::vector<Vec>& pts, const std::vector<double>& lambda,
                            const Vec& v, double t) {
  const int k = static_cast<int>(pts.size());
  require(k >= 1 && lambda.size() == pts.size(), Errc::invalid_input, "one coefficient per point");
  if (k == 1) return 1.0;
  require(k - 1 <= pts[0].size(), Errc::invalid_input, "more than d+1 points do not span a simplex");
  std::vector<Vec> moved;
  for (int i = 0; i < k; ++i) moved.push_back(pts[i] + lambda[i] * t * v);
  return simplex_volume(moved);
}

/// Fibre through a point: the line orthogonal to h (E^d), the g-line with
/// the given axis (H^d), or the half great circle through the poles of h
/// (S^d). Points on it are addressed by a signed parameter that is zero on h
/// and proportional to arc length along the fibre.
class Fiber {
 public:
  Fiber(const Hyperplane& h, const std::optional<Line>& axis, const Point& x) : h_(h) {
    const Geometry& g = h.geometry;
    require_same(g, x.geometry());
    if (g.is_euclidean()) {
      foot_ = x.coords() - (h.normal.dot(x.coords()) - h.offset) * h.normal;
      param_ = h.signed_distance(x);
    } else if (g.is_spherical()) {
      const Vec y = x.coords() - h.normal.dot(x.coords()) * h.normal;
      require(y.norm() > 1e-9, Errc::pole, "fibre through a pole of the hyperplane is degenerate");
      foot_ = y / y.norm();
      param_ = std::asin(std::clamp(h.normal.dot(x.coords()), -1.0, 1.0));
    } else {
      require(axis.has_value(), Errc::invalid_input, "hyperbolic fibres need an axis");
      m_ = detail::axis_foot(h, *axis);
      const Vec& p = x.coords();
      const Vec w = p + minkowski(p, m_) * m_ - minkowski(p, h.normal) * h.normal;
      cosh_delta_ = std::sqrt(1.0 + std::max(0.0, minkowski(w, w)));
      w_ = w;
      param_ = std::asinh(minkowski(p, h.normal) / cosh_delta_);
    }
  }

  /// Parameter of the point the fibre was built from.
  double param() const { return param_; }

  /// Parameter range covering the whole fibre, or a window of half-width
  /// `span` in the unbounded cases.
  std::pair<double, double> range(double span) const {
    if (h_.geometry.is_spherical()) {
      const double e = 1e-9;
      return {-std::numbers::pi / 2 + e, std::numbers::pi / 2 - e};
    }
    return {-span, span};
  }

  Point at(double t) const {
    const Geometry& g = h_.geometry;
    if (g.is_euclidean()) return Point(g, foot_ + t * h_.normal);
    if (g.is_spherical()) return Point::projected(g, std::cos(t) * foot_ + std::sin(t) * h_.normal);
    return Point::projected(g, cosh_delta_ * (std::cosh(t) * m_ + std::sinh(t) * h_.normal) + w_);
  }

 private:
  Hyperplane h_;
  Vec foot_, m_, w_;
  double cosh_delta_ = 1.0;
  double param_ = 0.0;
};

struct FiberOptions {
  double span = 20.0;      ///< half-width of the parameter window in E^d and H^d
  int initial_samples = 64;
  int max_samples = 1 << 14;
  double endpoint_tol = 1e-8;
  int max_bisections = 60;
};

/// Parameter interval [lo, hi] where the convex body meets the fibre, or
/// nothing if it misses within the sampled window.
inline std::optional<std::pair<double, double>> fiber_chord(const std::function<bool(const Point&)>& body,
                                                            const Fiber& f, const FiberOptions& opt = {}) {
  const auto [a, b] = f.range(opt.span);
  auto inside = [&](double t) {
    try {
      return body(f.at(t));
    } catch (const Error&) {
      return false;
    }
  };
  // adaptive sampling: refine the grid until some sample is inside
  std::optional<double> hit;
  int n = opt.initial_samples;
  double step = 0;
  for (; n <= opt.max_samples && !hit; n *= 4) {
    step = (b - a) / n;
    for (int i = 0; i <= n && !hit; ++i)
      if (inside(a + step * i)) hit = a + step * i;
  }
  if (!hit) return std::nullopt;
  auto refine = [&](double in, double out) {
    for (int it = 0; it < opt.max_bisections && std::abs(out - in) > opt.endpoint_tol; ++it) {
      const double mid = 0.5 * (in + out);
      (inside(mid) ? in : out) = mid;
    }
    return in;
  };
  // walk out from the hit on the sampling grid, then bisect each endpoint
  double lo = *hit, hi = *hit;
  while (lo - step >= a && inside(lo - step)) lo -= step;
  while (hi + step <= b && inside(hi + step)) hi += step;
  lo = lo - step >= a ? refine(lo, lo - step) : lo;
  hi = hi + step <= b ? refine(hi, hi + step) : hi;
  return std::make_pair(lo, hi);
}

/// Decides x in sigma(body) by measuring the body's chord on x's fibre and
/// centring it on h.
inline bool fiber_symmetral_membership(const std::function<bool(const Point&)>& body, const Hyperplane& h,
                                       const std::optional<Line>& axis, const Point& x,
                                       const FiberOptions& opt = {}) {
  const Fiber f(h, axis, x);
  const auto chord = fiber_chord(body, f, opt);
  if (!chord) return false;
  const double half = 0.5 * (chord->second - chord->first);
  return std::abs(f.param()) <= half + opt.endpoint_tol;
}

}  // namespace isop
