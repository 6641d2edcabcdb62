#pragma once

#include "isop/measures.hpp"
#include "isop/polytope.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

namespace isop {

struct Ball {
  Point center;
  double radius = 0;
};

namespace detail {

/// Inner product of the model: Euclidean for S^d, Minkowski for H^d.
inline Mat model_gram(Geometry g, const Mat& cols) {
  if (g.is_hyperbolic()) {
    const Vec j = flip_time(Vec::Ones(cols.rows()));
    return cols.transpose() * j.asDiagonal() * cols;
  }
  return cols.transpose() * cols;
}

inline std::optional<Vec> solve_gram(const Mat& G, const Vec& rhs) {
  Eigen::FullPivLU<Mat> lu(G);
  lu.setThreshold(1e-12);
  if (lu.rank() < G.rows()) return std::nullopt;
  return Vec(lu.solve(rhs));
}

/// Smallest ball through the points of `A` with centre in their convex hull,
/// or nothing if that centre falls outside the hull.
inline std::optional<Ball> support_ball(Geometry g, const std::vector<Vec>& A, double slack = 1e-12) {
  const int k = static_cast<int>(A.size());
  if (k == 1) return Ball{Point(g, A[0]), 0.0};
  if (g.is_euclidean()) {
    Mat E(A[0].size(), k - 1);
    for (int i = 1; i < k; ++i) E.col(i - 1) = A[i] - A[0];
    const Mat G = E.transpose() * E;
    const auto lam = solve_gram(G, 0.5 * G.diagonal());
    if (!lam) return std::nullopt;
    if (lam->minCoeff() < -slack || 1.0 - lam->sum() < -slack) return std::nullopt;
    const Vec c = A[0] + E * *lam;
    return Ball{Point(g, c), (c - A[0]).norm()};
  }
  Mat V(A[0].size(), k);
  for (int i = 0; i < k; ++i) V.col(i) = A[i];
  const Mat G = model_gram(g, V);
  const double sign = g.is_hyperbolic() ? -1.0 : 1.0;
  const auto lam = solve_gram(G, sign * Vec::Ones(k));
  if (!lam) return std::nullopt;
  if (lam->minCoeff() < -slack || lam->sum() <= 0) return std::nullopt;
  const Point c = point_from_lift(g, V * *lam);
  double r = 0;
  for (int i = 0; i < k; ++i) r = std::max(r, distance(c, Point(g, A[i])));
  return Ball{c, r};
}

}  // namespace detail

/// Minimal enclosing ball of the vertices, by enumerating support sets of
/// size at most d+1 with a nonnegative-weight certificate.
inline Ball circumball(const Polytope& P) {
  const Geometry& g = P.geometry();
  std::vector<Vec> xs;
  for (const auto& v : P.vertices()) xs.push_back(v.coords());
  std::optional<Ball> best;
  for (int m = 1; m <= std::min(P.size(), g.dim + 1); ++m) {
    for_each_combination(P.size(), m, [&](const std::vector<int>& sub) {
      std::vector<Vec> A;
      for (int i : sub) A.push_back(xs[i]);
      auto b = detail::support_ball(g, A);
      if (!b) return true;
      if (best && b->radius >= best->radius) return true;
      const double slack = 1e-10 * std::max(1.0, b->radius);
      for (const auto& v : P.vertices())
        if (distance(b->center, v) > b->radius + slack) return true;
      best = b;
      return true;
    });
  }
  require(best.has_value(), Errc::non_convergence, "no enclosing support set found");
  return *best;
}

/// Euclidean Chebyshev ball by linear programming, shifted so the vertex
/// centroid is the start: maximize r subject to <u_i, y> - r >= -s_i.
inline Ball inball_lp(const Polytope& P) {
  const Geometry& g = P.geometry();
  require(g.is_euclidean(), Errc::geometry_mismatch, "LP inball is Euclidean");
  const int d = g.dim;
  Vec x0 = Vec::Zero(d);
  for (const auto& v : P.vertices()) x0 += v.coords();
  x0 /= P.size();
  const int m = static_cast<int>(P.facets().size());
  Mat A(m, 2 * d + 1);
  Vec b(m);
  for (int i = 0; i < m; ++i) {
    const Hyperplane h = P.facet_hyperplane(i);
    A.block(i, 0, 1, d) = -h.normal.transpose();
    A.block(i, d, 1, d) = h.normal.transpose();
    A(i, 2 * d) = 1.0;
    b[i] = std::max(0.0, h.signed_distance(Point(g, x0)));
  }
  Vec c = Vec::Zero(2 * d + 1);
  c[2 * d] = 1.0;
  const LpResult r = lp_maximize(A, b, c);
  require(r.status == LpResult::Status::optimal, Errc::non_convergence, "inball LP unbounded");
  const Vec y = r.x.head(d) - r.x.segment(d, d);
  return Ball{Point(g, x0 + y), r.value};
}

/// Inscribed ball of a spherical or hyperbolic polytope by enumerating KKT
/// support sets of facets: for each set the centre is the point equidistant
/// from those facets with multipliers of the right sign; the largest
/// feasible candidate is the maximum (also when distance is not concave).
inline Ball inball_kkt(const Polytope& P) {
  const Geometry& g = P.geometry();
  require(!g.is_euclidean(), Errc::geometry_mismatch, "KKT inball is for S^d and H^d");
  const int m = static_cast<int>(P.facets().size());
  const int D = g.dim + 1;
  Mat U(D, m);
  for (int i = 0; i < m; ++i) U.col(i) = P.facet_hyperplane(i).normal;
  const Mat Gall = detail::model_gram(g, U);
  auto ip = [&](const Vec& a, const Vec& b) { return g.is_hyperbolic() ? minkowski(a, b) : a.dot(b); };

  std::optional<Ball> best;
  double best_s = -1;
  for (int k = 1; k <= std::min(m, D); ++k) {
    for_each_combination(m, k, [&](const std::vector<int>& sub) {
      Mat G(k, k);
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) G(a, b) = Gall(sub[a], sub[b]);
      const auto lam = detail::solve_gram(G, Vec::Ones(k));
      if (!lam) return true;
      Vec c = Vec::Zero(D);
      for (int a = 0; a < k; ++a) c += (*lam)[a] * U.col(sub[a]);
      double s;
      if (g.is_spherical()) {
        if (lam->minCoeff() < -1e-12) return true;
        const double n = c.norm();
        if (n <= 0) return true;
        c /= n;
        s = 1.0 / n;
      } else {
        const double q = -minkowski(c, c);
        if (q <= 0 || c[0] <= 0 || lam->maxCoeff() > 1e-12) return true;
        c /= std::sqrt(q);
        s = 1.0 / std::sqrt(q);
      }
      if (s <= best_s) return true;
      for (int i = 0; i < m; ++i)
        if (ip(c, U.col(i)) < s - 1e-12 * std::max(1.0, s)) return true;
      best_s = s;
      const double r = g.is_spherical() ? std::asin(std::min(1.0, s)) : std::asinh(s);
      best = Ball{Point::projected(g, c), r};
      return true;
    });
  }
  require(best.has_value(), Errc::non_convergence, "no feasible inball support set");
  if (g.is_spherical()) best->radius = std::min(best->radius, std::numbers::pi / 2 - 1e-6);
  return *best;
}

/// Largest ball contained in P.
inline Ball inball(const Polytope& P) {
  return P.geometry().is_euclidean() ? inball_lp(P) : inball_kkt(P);
}

/// True if the ball lies inside P (up to `slack`).
inline bool contains_ball(const Polytope& P, const Ball& B, double slack = 1e-9) {
  if (!P.contains(B.center)) return false;
  for (size_t i = 0; i < P.facets().size(); ++i)
    if (P.facet_hyperplane(static_cast<int>(i)).signed_distance(B.center) < B.radius - slack) return false;
  return true;
}

/// Smallest distance from `c` to a facet hyperplane of P.
inline double facet_clearance(const Polytope& P, const Point& c) {
  double m = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < P.facets().size(); ++i)
    m = std::min(m, P.facet_hyperplane(static_cast<int>(i)).signed_distance(c));
  return m;
}

/// tan(cirr) - d tan(ir) in S^d, tanh(cirr) - d tanh(ir) in H^d, and
/// R - d r in E^d; nonnegative with equality for regular simplices.
inline double ratio_gap(const Polytope& P) {
  require(P.is_simplex(), Errc::invalid_input, "ratio gap is defined for simplices");
  const Geometry& g = P.geometry();
  require(!(g.is_spherical() && g.dim >= 4), Errc::unsupported,
          "spherical ratio inequality is only established for d <= 3");
  const double R = circumball(P).radius;
  const double r = inball(P).radius;
  const double d = g.dim;
  switch (g.space) {
    case Space::euclidean: return R - d * r;
    case Space::spherical: return std::tan(R) - d * std::tan(r);
    case Space::hyperbolic: return std::tanh(R) - d * std::tanh(r);
  }
  return 0;
}

}  // namespace isop
