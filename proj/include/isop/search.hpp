#pragma once

#include "isop/balls.hpp"
#include "isop/extremal.hpp"
#include "isop/measures.hpp"
#include "isop/random.hpp"
#include "isop/steiner.hpp"

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace isop {

enum class Objective { volume, tel, kcontent, inradius, density, moment, u1, ratio };
enum class Direction { minimize, maximize };
enum class ConstraintKind { none, inscribed, circumscribed, unit_volume };

inline const char* objective_name(Objective o) {
  switch (o) {
    case Objective::volume: return "volume";
    case Objective::tel: return "TEL";
    case Objective::kcontent: return "k-content";
    case Objective::inradius: return "inradius";
    case Objective::density: return "density";
    case Objective::moment: return "moment";
    case Objective::u1: return "u1";
    case Objective::ratio: return "ratio";
  }
  return "?";
}

inline Objective parse_objective(const std::string& s) {
  for (Objective o : {Objective::volume, Objective::tel, Objective::kcontent, Objective::inradius,
                      Objective::density, Objective::moment, Objective::u1, Objective::ratio})
    if (s == objective_name(o)) return o;
  if (s == "tel") return Objective::tel;
  throw Error(Errc::invalid_input, "unknown objective '" + s + "'");
}

inline const char* constraint_name(ConstraintKind c) {
  switch (c) {
    case ConstraintKind::none: return "none";
    case ConstraintKind::inscribed: return "inscribed";
    case ConstraintKind::circumscribed: return "circumscribed";
    case ConstraintKind::unit_volume: return "unit-volume";
  }
  return "?";
}

inline ConstraintKind parse_constraint(const std::string& s) {
  for (ConstraintKind c : {ConstraintKind::none, ConstraintKind::inscribed, ConstraintKind::circumscribed,
                           ConstraintKind::unit_volume})
    if (s == constraint_name(c)) return c;
  throw Error(Errc::invalid_input, "unknown constraint '" + s + "'");
}

/// Inscribed: P inside B with its vertices pushed onto the boundary sphere.
/// Circumscribed: P contains a ball of B's radius (the centre may move).
struct Constraint {
  ConstraintKind kind = ConstraintKind::none;
  std::optional<Ball> ball;
};

/// Objective value of a polytope; exact wherever the measures module is.
struct ObjectiveSpec {
  Objective kind = Objective::volume;
  int k = 1;
  MCConfig mc{};
  std::optional<DensityFn> density;

  Estimate operator()(const Polytope& P) const {
    switch (kind) {
      case Objective::volume: return polytope_volume(P, VolumeMethod::automatic, mc);
      case Objective::tel: return {total_edge_length(P), 0.0};
      case Objective::kcontent: return k_content(P, k, VolumeMethod::automatic, mc);
      case Objective::inradius: return {inball(P).radius, 0.0};
      case Objective::ratio: return {ratio_gap(P), 0.0};
      case Objective::u1: return u1(P, mc);
      case Objective::density:
        require(density.has_value(), Errc::invalid_input, "density objective needs a density");
        return density_integral(P, *density, mc);
      case Objective::moment: break;
    }
    throw Error(Errc::unsupported, std::string("objective ") + objective_name(kind) + " is not a polytope functional");
  }

  /// True when the value carries no sampling noise.
  bool exact_for(const Polytope& P) const {
    switch (kind) {
      case Objective::volume: return P.geometry().is_euclidean() || P.dim() == 2;
      case Objective::kcontent: return P.geometry().is_euclidean() || k <= 2;
      case Objective::tel:
      case Objective::inradius:
      case Objective::ratio: return true;
      default: return false;
    }
  }
};

/// Point at distance `radius` from c in the direction of p.
inline Point radial_to_sphere(const Point& c, const Point& p, double radius) {
  require(distance(c, p) > 1e-14, Errc::degenerate, "vertex at the ball centre has no radial direction");
  return point_toward(c, p, radius);
}

/// Scales a Euclidean polytope about `c` by s.
inline Polytope scale_euclidean(const Polytope& P, const Vec& c, double s) {
  std::vector<Point> v;
  for (const auto& x : P.vertices()) v.push_back(Point(P.geometry(), c + s * (x.coords() - c)));
  return Polytope::from_vertices(std::move(v));
}

/// Geodesic homothety about c: each vertex moves along the geodesic from c
/// to s times its distance.
inline Polytope scale_geodesic(const Polytope& P, const Point& c, double s) {
  if (P.geometry().is_euclidean()) return scale_euclidean(P, c.coords(), s);
  const Isometry to = to_basepoint(c), back = to.inverse();
  std::vector<Point> v;
  for (const auto& x : P.vertices()) v.push_back(back.apply(exp_base(P.geometry(), s * log_base(to.apply(x)))));
  return Polytope::from_vertices(std::move(v));
}

inline Vec vertex_centroid(const Polytope& P) {
  Vec c = Vec::Zero(P.dim());
  for (const auto& v : P.vertices()) c += v.coords();
  return c / P.size();
}

/// Pairs (i, j), i < j, whose edge symmetrization is defined.
inline std::vector<std::pair<int, int>> admissible_edges(const Polytope& P) {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < P.size(); ++i)
    for (int j = i + 1; j < P.size(); ++j)
      if (hyperplane_through_rest(P, i, j)) out.emplace_back(i, j);
  return out;
}

/// Largest distance from a reflected vertex to the vertex set, over the
/// bisectors of all admissible edges. Zero for a bisector-symmetric P.
inline double bisector_asymmetry(const Polytope& P) {
  double worst = 0;
  for (const auto& [i, j] : admissible_edges(P)) {
    const Hyperplane h = bisector(P.vertex(i), P.vertex(j));
    for (const auto& v : P.vertices()) {
      const Point r = reflect(h, v);
      double best = std::numeric_limits<double>::infinity();
      for (const auto& w : P.vertices()) best = std::min(best, distance(r, w));
      worst = std::max(worst, best);
    }
  }
  return worst;
}

struct DescentOptions {
  ObjectiveSpec objective{};
  Direction direction = Direction::maximize;
  Constraint constraint{};
  double min_improvement = 1e-10;
  int max_steps = 5000;
  int max_polish_steps = 400;
  double polish_tol = 1e-12;  ///< polishing stops once no edge moves a vertex further
};

struct DescentResult {
  Polytope polytope;
  std::vector<double> history;  ///< objective after each accepted step, starting value first
  std::vector<std::pair<int, int>> edges;
  bool fixed_point = false;     ///< stopped because no edge improved
  int polish_steps = 0;
};

/// Whether edge symmetrization provably moves the objective the right way
/// for this geometry, objective, direction and constraint.
inline bool descent_supported(const Geometry& g, const DescentOptions& o) {
  const Objective ob = o.objective.kind;
  const ConstraintKind c = o.constraint.kind;
  const bool max = o.direction == Direction::maximize;
  if (g.is_euclidean()) {
    // symmetrization keeps volume and does not shrink the inradius
    if (ob == Objective::volume)
      return max ? c == ConstraintKind::inscribed : c == ConstraintKind::circumscribed;
    if (ob == Objective::tel || ob == Objective::kcontent)
      return !max && (c == ConstraintKind::unit_volume || c == ConstraintKind::circumscribed);
    if (ob == Objective::inradius) return max && c == ConstraintKind::unit_volume;
    return false;
  }
  // bounding polytopes only give one-sided bounds
  if (ob == Objective::volume) return max && c == ConstraintKind::inscribed && g.dim == 2;
  if (ob == Objective::tel) return !max && c == ConstraintKind::circumscribed;
  return false;
}

/// Where the geodesic ray from `from` (inside B) through `p` leaves B.
inline Point ray_to_sphere(const Point& from, const Point& p, const Ball& B) {
  const Geometry& g = from.geometry();
  require(distance(from, p) > 1e-14, Errc::degenerate, "ray needs two distinct points");
  if (g.is_euclidean()) {
    const Vec u = (p.coords() - from.coords()).normalized();
    const Vec w = from.coords() - B.center.coords();
    const double b = u.dot(w), c = w.squaredNorm() - B.radius * B.radius;
    require(c <= 1e-12, Errc::invalid_input, "ray origin outside the ball");
    return Point(g, from.coords() + (-b + std::sqrt(std::max(0.0, b * b - c))) * u);
  }
  auto out = [&](double t) { return distance(B.center, point_toward(from, p, t)) > B.radius; };
  double lo = 0, hi = B.radius;
  while (!out(hi)) {
    lo = hi;
    hi *= 2;
    require(hi < 1e3, Errc::non_convergence, "ray does not leave the ball");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) (out(0.5 * (lo + hi)) ? hi : lo) = 0.5 * (lo + hi);
  return point_toward(from, p, 0.5 * (lo + hi));
}

namespace detail {

/// Applies the constraint to a symmetrized vertex set; nothing if
/// infeasible. Inscribed vertices are pushed onto the boundary sphere along
/// rays from `from` (the ball centre when not given).
inline std::optional<Polytope> constrain(std::vector<Point> pts, const Constraint& con,
                                         const std::optional<Point>& from = std::nullopt) {
  try {
    if (con.kind == ConstraintKind::inscribed) {
      const Ball& B = *con.ball;
      for (auto& p : pts) {
        if (std::abs(distance(B.center, p) - B.radius) <= 1e-13) continue;
        p = from ? ray_to_sphere(*from, p, B) : radial_to_sphere(B.center, p, B.radius);
      }
    }
    std::optional<Polytope> P = Polytope::hull_of(std::move(pts));
    const Geometry& g = P->geometry();
    if (con.kind == ConstraintKind::circumscribed) {
      const Ball b = inball(*P);
      const double r = con.ball->radius;
      if (g.is_euclidean()) {
        P = scale_euclidean(*P, b.center.coords(), r / b.radius);
      } else if (b.radius < r - 1e-12) {
        return std::nullopt;
      } else if (b.radius > r + 1e-12) {
        // shrink about the incentre until the inradius is back to r
        double lo = 0, hi = 1;
        for (int it = 0; it < 60 && hi - lo > 1e-13; ++it) {
          const double mid = 0.5 * (lo + hi);
          (inball(scale_geodesic(*P, b.center, mid)).radius >= r ? hi : lo) = mid;
        }
        P = scale_geodesic(*P, b.center, hi);
      }
    } else if (con.kind == ConstraintKind::unit_volume) {
      require(g.is_euclidean(), Errc::unsupported, "unit-volume normalization is Euclidean");
      const double v = polytope_volume(*P).value;
      P = scale_euclidean(*P, vertex_centroid(*P), std::pow(1.0 / v, 1.0 / g.dim));
    }
    return P;
  } catch (const Error&) {
    return std::nullopt;
  }
}

/// One edge step: symmetrize, then restore the constraint. Projected
/// vertices are pushed out from the edge midpoint, which lies in the
/// relative interior of their hull, so the step never shrinks the body.
inline std::optional<Polytope> descent_step(const Polytope& P, int i, int j, const Constraint& con) {
  try {
    return constrain(steiner_points(P, i, j), con, midpoint(P.vertex(i), P.vertex(j)));
  } catch (const Error&) {
    return std::nullopt;
  }
}

inline double max_displacement(const Polytope& a, const Polytope& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double m = 0;
  for (int i = 0; i < a.size(); ++i) m = std::max(m, distance(a.vertex(i), b.vertex(i)));
  return m;
}

}  // namespace detail

/// Repeated best-improvement edge symmetrization. Ties go to the
/// lexicographically first vertex pair. Once no edge improves the objective
/// by more than min_improvement, a polishing phase keeps applying the edge
/// that moves the vertices most, as long as the objective does not get
/// worse beyond round-off: near the fixed point the objective is quadratic
/// in the asymmetry, so the improvement threshold alone leaves the vertices
/// only about sqrt(min_improvement) from symmetric.
inline DescentResult symmetrization_descent(const Polytope& P0, const DescentOptions& opt) {
  const Geometry& g = P0.geometry();
  require(P0.size() == g.dim + 1 || P0.size() == g.dim + 2, Errc::invalid_input,
          "descent expects d+1 or d+2 vertices");
  require(descent_supported(g, opt), Errc::unsupported,
          std::string("symmetrization does not control ") + objective_name(opt.objective.kind) +
              " in this direction for " + geometry_name(g));
  const ConstraintKind ck = opt.constraint.kind;
  require(ck == ConstraintKind::none || ck == ConstraintKind::unit_volume || opt.constraint.ball.has_value(),
          Errc::invalid_input, "ball constraint needs a ball");
  const double sgn = opt.direction == Direction::maximize ? 1.0 : -1.0;

  // bring the start onto the constraint set
  std::optional<Polytope> cur = detail::constrain(P0.vertices(), opt.constraint);
  require(cur.has_value(), Errc::infeasible, "starting polytope violates the constraint");
  DescentResult res{*cur, {opt.objective(*cur).value}, {}, false, 0};
  require(!admissible_edges(*cur).empty(), Errc::hypothesis, "no admissible edge to symmetrize");

  for (int step = 0; step < opt.max_steps; ++step) {
    double best_gain = opt.min_improvement;
    std::optional<Polytope> best;
    std::pair<int, int> best_edge{-1, -1};
    for (const auto& [i, j] : admissible_edges(*cur)) {
      auto next = detail::descent_step(*cur, i, j, opt.constraint);
      if (!next) continue;
      const double gain = sgn * (opt.objective(*next).value - res.history.back());
      if (gain > best_gain) {
        best_gain = gain;
        best = std::move(next);
        best_edge = {i, j};
      }
    }
    if (!best) {
      res.fixed_point = true;
      break;
    }
    cur = std::move(best);
    res.history.push_back(opt.objective(*cur).value);
    res.edges.push_back(best_edge);
  }

  if (res.fixed_point) {
    double f = res.history.back();
    for (; res.polish_steps < opt.max_polish_steps; ++res.polish_steps) {
      double move = opt.polish_tol;
      std::optional<Polytope> best;
      double fbest = f;
      for (const auto& [i, j] : admissible_edges(*cur)) {
        auto next = detail::descent_step(*cur, i, j, opt.constraint);
        if (!next) continue;
        const double m = detail::max_displacement(*cur, *next);
        const double fn = opt.objective(*next).value;
        if (m > move && sgn * (fn - f) >= -1e-13 * std::max(1.0, std::abs(f))) {
          move = m;
          best = std::move(next);
          fbest = fn;
        }
      }
      if (!best) break;
      cur = std::move(best);
      f = fbest;
    }
  }
  res.polytope = *cur;
  return res;
}

struct RandomSearchOptions {
  int iterations = 2000;
  double sigma = 0.05;     ///< initial geodesic step of a vertex move
  double min_sigma = 1e-6;
  int patience = 60;       ///< failed moves before the step halves
};

/// Accept-if-better local search moving one vertex at a time. `feasible`
/// decides the constraint; `value` is the objective.
inline DescentResult random_search(const Polytope& P0, const std::function<double(const Polytope&)>& value,
                                   const std::function<bool(const Polytope&)>& feasible, Direction dir,
                                   Rng& rng, const RandomSearchOptions& opt = {}) {
  const Geometry& g = P0.geometry();
  const double sgn = dir == Direction::maximize ? 1.0 : -1.0;
  DescentResult res{P0, {value(P0)}, {}, false, 0};
  double sigma = opt.sigma;
  int fails = 0;
  for (int it = 0; it < opt.iterations && sigma >= opt.min_sigma; ++it) {
    const int i = static_cast<int>(rng() % static_cast<std::uint64_t>(res.polytope.size()));
    std::vector<Point> pts = res.polytope.vertices();
    const Isometry T = to_basepoint(pts[i]).inverse();
    pts[i] = T.apply(exp_base(g, sigma * gaussian_vec(rng, g.dim)));
    bool ok = false;
    try {
      const Polytope Q = Polytope::from_vertices(pts);
      if (feasible(Q)) {
        const double v = value(Q);
        if (sgn * (v - res.history.back()) > 0) {
          res.polytope = Q;
          res.history.push_back(v);
          res.edges.emplace_back(i, -1);
          ok = true;
        }
      }
    } catch (const Error&) {
    }
    if (ok) {
      fails = 0;
    } else if (++fails >= opt.patience) {
      sigma *= 0.5;
      fails = 0;
    }
  }
  res.fixed_point = sigma < opt.min_sigma;
  return res;
}

/// n points on the boundary sphere of B.
inline std::vector<Point> random_on_ball_boundary(Rng& rng, const Ball& B, int n) {
  const Geometry& g = B.center.geometry();
  const Isometry T = to_basepoint(B.center).inverse();
  std::vector<Point> out;
  for (int i = 0; i < n; ++i) out.push_back(T.apply(random_on_sphere(rng, g, B.radius)));
  return out;
}

/// Simplex whose i-th facet is at distance dist[i] >= 0 from the centre of
/// B in the tangent direction dirs[i]; facets with dist == B.radius touch
/// B. Nothing if the halfspaces do not bound a simplex of the geometry.
inline std::optional<Polytope> simplex_from_facets(const Ball& B, const std::vector<Vec>& dirs,
                                                   const std::vector<double>& dist) {
  const Geometry& g = B.center.geometry();
  const int d = g.dim, D = d + 1;
  require(static_cast<int>(dirs.size()) == D && dist.size() == dirs.size(), Errc::invalid_input,
          "a simplex needs d+1 facets");
  Mat F(D, D);
  for (int i = 0; i < D; ++i) {
    const Vec u = dirs[i].normalized();
    const double r = dist[i];
    Vec f(D);
    switch (g.space) {
      case Space::euclidean: f << r, -u; break;
      case Space::spherical: f << std::sin(r), -std::cos(r) * u; break;
      case Space::hyperbolic: f << std::sinh(r), -std::cosh(r) * u; break;
    }
    F.row(i) = f.transpose();
  }
  // vertex i is the lifted vector killed by every functional except the i-th
  Eigen::FullPivLU<Mat> lu(F);
  if (lu.rank() < D) return std::nullopt;
  const Mat Finv = lu.inverse();
  const Isometry T = to_basepoint(B.center).inverse();
  std::vector<Point> v;
  for (int i = 0; i < D; ++i) {
    Vec l = Finv.col(i);
    try {
      Point p = point_from_lift(g, l);
      if (g.is_spherical() && p.coords()[0] <= 1e-9) return std::nullopt;
      v.push_back(T.apply(p));
    } catch (const Error&) {
      return std::nullopt;
    }
  }
  try {
    Polytope P = Polytope::from_vertices(std::move(v));
    if (!contains_ball(P, B, 1e-9)) return std::nullopt;
    return P;
  } catch (const Error&) {
    return std::nullopt;
  }
}

/// Random simplex containing B; each facet touches B with probability
/// `touch`, otherwise sits up to `slack` further out.
inline Polytope random_simplex_containing(Rng& rng, const Ball& B, double touch = 1.0, double slack = 0.0,
                                          int max_tries = 100000) {
  const Geometry& g = B.center.geometry();
  for (int t = 0; t < max_tries; ++t) {
    std::vector<Vec> dirs;
    std::vector<double> dist;
    for (int i = 0; i <= g.dim; ++i) {
      dirs.push_back(random_unit(rng, g.dim));
      dist.push_back(uniform01(rng) < touch ? B.radius : B.radius + slack * uniform01(rng));
    }
    if (auto P = simplex_from_facets(B, dirs, dist)) return *P;
  }
  throw Error(Errc::infeasible, "no random simplex containing the ball found");
}

/// conv(S1 u S2) with both regular simplices inscribed in the sphere of
/// radius R about the basepoint.
inline Polytope inscribed_join(Geometry g, int k, double R) {
  return orthogonal_join(g, k, regular_inradius({g.space, k}, R), regular_inradius({g.space, g.dim - k}, R));
}

/// Random nondegenerate simplex with all vertices on the sphere of radius R
/// about the basepoint.
inline Polytope random_simplex_on_sphere(Rng& rng, Geometry g, double R) {
  for (;;) {
    try {
      Polytope P = Polytope::from_vertices([&] {
        std::vector<Point> v;
        for (int i = 0; i <= g.dim; ++i) v.push_back(random_on_sphere(rng, g, R));
        return v;
      }());
      if (inball(P).radius > 1e-3 * R) return P;
    } catch (const Error&) {
    }
  }
}

/// Euclidean conv(S1 u S2 u Q): regular simplices S1 (dimension k1,
/// circumradius s1) and S2 (k2, s2) in orthogonal coordinate blocks centred
/// at the origin, and a regular simplex Q with d-k1-k2 vertices and
/// circumradius a in the next block, centred at rho e_d.
inline Polytope stacked_join(int d, int k1, int k2, double s1, double s2, double a, double rho) {
  const int nq = d - k1 - k2;
  require(k1 >= 1 && k2 >= 1 && nq >= 1, Errc::invalid_input, "stacked join needs k1, k2 >= 1 and k1 + k2 < d");
  const Geometry g = Geometry::euclidean(d);
  std::vector<Point> v;
  int off = 0;
  for (auto [k, s] : {std::pair{k1, s1}, std::pair{k2, s2}}) {
    const Mat U = unit_regular_simplex(k);
    for (int i = 0; i <= k; ++i) {
      Vec x = Vec::Zero(d);
      x.segment(off, k) = s * U.col(i);
      v.push_back(Point(g, x));
    }
    off += k;
  }
  if (nq == 1) {
    Vec x = Vec::Zero(d);
    x[d - 1] = rho;
    v.push_back(Point(g, x));
  } else {
    const Mat U = unit_regular_simplex(nq - 1);
    for (int i = 0; i < nq; ++i) {
      Vec x = Vec::Zero(d);
      x.segment(off, nq - 1) = a * U.col(i);
      x[d - 1] = rho;
      v.push_back(Point(g, x));
    }
  }
  return Polytope::from_vertices(std::move(v));
}

}  // namespace isop
