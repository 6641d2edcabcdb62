#pragma once

#include "isop/balls.hpp"
#include "isop/measures.hpp"
#include "isop/polytope.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

namespace isop {

/// k+1 unit vectors in R^k with pairwise inner product -1/k (vertices of a
/// regular simplex inscribed in the unit sphere), from a Helmert basis.
inline Mat unit_regular_simplex(int k) {
  require(k >= 1, Errc::invalid_input, "simplex dimension must be positive");
  Mat E = Mat::Identity(k + 1, k + 1) - Mat::Constant(k + 1, k + 1, 1.0 / (k + 1));
  // orthonormal basis of the sum-zero hyperplane
  Mat H(k + 1, k);
  for (int j = 0; j < k; ++j) {
    Vec h = Vec::Zero(k + 1);
    h.head(j + 1).setConstant(1.0);
    h[j + 1] = -(j + 1.0);
    H.col(j) = h / h.norm();
  }
  Mat U = (E * H).transpose();  // k x (k+1)
  for (int i = 0; i <= k; ++i) U.col(i).normalize();
  return U;
}

enum class RegularBy { circumradius, inradius, edge };

/// Circumradius of a regular d-simplex with the given inradius or edge.
inline double regular_circumradius(Geometry g, RegularBy by, double value) {
  const double d = g.dim;
  require(value > 0, Errc::invalid_input, "size parameter must be positive");
  switch (by) {
    case RegularBy::circumradius:
      if (g.is_spherical())
        require(value < std::numbers::pi / 2, Errc::infeasible, "spherical circumradius must be < pi/2");
      return value;
    case RegularBy::inradius:
      if (g.is_euclidean()) return d * value;
      if (g.is_spherical()) {
        require(value < std::numbers::pi / 2, Errc::infeasible, "spherical inradius must be < pi/2");
        return std::atan(d * std::tan(value));
      }
      require(d * std::tanh(value) < 1.0, Errc::infeasible,
              "no regular hyperbolic simplex has this inradius");
      return std::atanh(d * std::tanh(value));
    case RegularBy::edge: {
      if (g.is_euclidean()) return value / std::sqrt(2.0 * (1.0 + 1.0 / d));
      if (g.is_spherical()) {
        const double s2 = (1.0 - std::cos(value)) * d / (d + 1.0);
        require(s2 < 1.0, Errc::infeasible, "spherical edge too long for a regular simplex");
        return std::asin(std::sqrt(s2));
      }
      return std::asinh(std::sqrt((std::cosh(value) - 1.0) * d / (d + 1.0)));
    }
  }
  return value;
}

inline double regular_inradius(Geometry g, double R) {
  const double d = g.dim;
  switch (g.space) {
    case Space::euclidean: return R / d;
    case Space::spherical: return std::atan(std::tan(R) / d);
    case Space::hyperbolic: return std::atanh(std::tanh(R) / d);
  }
  return 0;
}

inline double regular_edge(Geometry g, double R) {
  const double d = g.dim;
  switch (g.space) {
    case Space::euclidean: return R * std::sqrt(2.0 * (1.0 + 1.0 / d));
    case Space::spherical: {
      // cos a = cos^2 R - sin^2 R / d, written to avoid cancellation
      const double s = std::sin(R);
      return 2.0 * std::asin(std::sqrt(0.5 * s * s * (1.0 + 1.0 / d)));
    }
    case Space::hyperbolic: {
      const double s = std::sinh(R);
      return 2.0 * std::asinh(std::sqrt(0.5 * s * s * (1.0 + 1.0 / d)));
    }
  }
  return 0;
}

/// Regular simplex centred at the basepoint.
inline Polytope regular_simplex(Geometry g, RegularBy by, double value) {
  const double R = regular_circumradius(g, by, value);
  const Mat U = unit_regular_simplex(g.dim);
  std::vector<Point> v;
  for (int i = 0; i <= g.dim; ++i) v.push_back(exp_base(g, U.col(i) * R));
  return Polytope::from_vertices(std::move(v));
}

/// conv(S1 u S2) with S1 a regular k-simplex in the first k coordinate
/// directions and S2 a regular (d-k)-simplex in the rest, both centred at
/// the basepoint with inradii r1 and r2 inside their own subspaces.
inline Polytope orthogonal_join(Geometry g, int k, double r1, double r2) {
  const int d = g.dim;
  require(k >= 1 && k <= d - 1, Errc::invalid_input, "join needs 1 <= k <= d-1");
  const double R1 = regular_circumradius({g.space, k}, RegularBy::inradius, r1);
  const double R2 = regular_circumradius({g.space, d - k}, RegularBy::inradius, r2);
  const Mat U1 = unit_regular_simplex(k);
  const Mat U2 = unit_regular_simplex(d - k);
  std::vector<Point> v;
  for (int i = 0; i <= k; ++i) {
    Vec t = Vec::Zero(d);
    t.head(k) = U1.col(i) * R1;
    v.push_back(exp_base(g, t));
  }
  for (int i = 0; i <= d - k; ++i) {
    Vec t = Vec::Zero(d);
    t.tail(d - k) = U2.col(i) * R2;
    v.push_back(exp_base(g, t));
  }
  return Polytope::from_vertices(std::move(v));
}

/// The Euclidean join whose inscribed unit ball touches every facet:
/// r1 = sqrt(1 + e^t), r2 = sqrt(1 + e^-t).
inline Polytope unit_inball_join(int d, int k, double t) {
  return orthogonal_join(Geometry::euclidean(d), k, std::sqrt(1.0 + std::exp(t)),
                         std::sqrt(1.0 + std::exp(-t)));
}

/// Printed closed form for the volume of the Euclidean join,
/// (1/d!) r1^k r2^(d-k) k^(k+1/2) (d-k)^(d-k+1/2) (k+1)(d-k+1).
/// It matches the true volume only for d = 2; see join_volume.
inline double euvol_closed_form(int d, int k, double r1, double r2) {
  return std::pow(r1, k) * std::pow(r2, d - k) * std::pow(k, k + 0.5) *
         std::pow(d - k, d - k + 0.5) * (k + 1) * (d - k + 1) / factorial(d);
}

/// Volume of the Euclidean join from the Gram determinant of the cone over
/// one facet pair: (1/d!) r1^k r2^(d-k) k^(k/2) (k+1)^((k+1)/2) (d-k)^((d-k)/2) (d-k+1)^((d-k+1)/2).
inline double join_volume(int d, int k, double r1, double r2) {
  const double m = d - k;
  return std::pow(r1, k) * std::pow(r2, m) * std::pow(k, 0.5 * k) * std::pow(k + 1.0, 0.5 * (k + 1)) *
         std::pow(m, 0.5 * m) * std::pow(m + 1.0, 0.5 * (m + 1)) / factorial(d);
}

/// f_k(t): printed closed form evaluated on the unit-inball family.
inline double f_k(int d, int k, double t) {
  return euvol_closed_form(d, k, std::sqrt(1.0 + std::exp(t)), std::sqrt(1.0 + std::exp(-t)));
}

/// Stationary point of f_k, t* = ln((d-k)/k).
inline double t_star(int d, int k) { return std::log(static_cast<double>(d - k) / k); }

/// g_d(k) = d^(d/2)/d! k^((k+1)/2) (d-k)^((d-k+1)/2) (k+1)(d-k+1).
inline double g_d(int d, int k) {
  return std::pow(d, 0.5 * d) / factorial(d) * std::pow(k, 0.5 * (k + 1)) *
         std::pow(d - k, 0.5 * (d - k + 1)) * (k + 1) * (d - k + 1);
}

inline double euvolir_bound(int d) { return g_d(d, d / 2); }

/// Volume of the Euclidean regular simplex with unit inradius.
inline double regular_simplex_unit_inradius_volume(int d) {
  return std::pow(d, 0.5 * d) * std::pow(d + 1.0, 0.5 * (d + 1)) / factorial(d);
}

/// Total edge length of the regular spherical d-simplex with inradius r.
inline double spherical_regular_TEL(double r, int d) {
  const double t2 = std::tan(r) * std::tan(r);
  return binomial(d + 1, 2) * std::acos((1.0 - d * t2) / (1.0 + d * d * t2));
}

/// Spherical simplex with d vertices clustered around c' = cos x e0 - sin x e_d
/// (a regular (d-1)-simplex of total edge length eps/2) and apex
/// p = cos x e0 + sin x e_d. Its total edge length is below d pi + eps.
inline Polytope spike_simplex_spherical(int d, double eps, double x) {
  require(d >= 2 && eps > 0, Errc::invalid_input, "spike needs d >= 2 and eps > 0");
  const Geometry g = Geometry::spherical(d);
  const int m = d - 1;
  const double a0 = 0.5 * eps / binomial(d, 2);
  const double rho = std::asin(std::sqrt((1.0 - std::cos(a0)) * m / (m + 1.0)));
  Vec cp = Vec::Zero(d + 1), p = Vec::Zero(d + 1);
  cp[0] = std::cos(x);
  cp[d] = -std::sin(x);
  p[0] = std::cos(x);
  p[d] = std::sin(x);
  std::vector<Point> v;
  if (m == 1) {
    for (double s : {-1.0, 1.0}) {
      Vec w = Vec::Zero(d + 1);
      w[1] = s;
      v.push_back(Point::projected(g, std::cos(rho) * cp + std::sin(rho) * w));
    }
  } else {
    const Mat U = unit_regular_simplex(m);
    for (int i = 0; i <= m; ++i) {
      Vec w = Vec::Zero(d + 1);
      w.segment(1, m) = U.col(i);
      v.push_back(Point::projected(g, std::cos(rho) * cp + std::sin(rho) * w));
    }
  }
  v.push_back(Point::projected(g, p));
  return Polytope::from_vertices(std::move(v));
}

/// Pushes x towards pi/2 until the spike contains B(e0, r).
inline Polytope spike_containing_ball(int d, double eps, double r, double* x_out = nullptr) {
  const Point c = basepoint(Geometry::spherical(d));
  for (double delta = 0.5; delta > 1e-12; delta *= 0.5) {
    const double x = std::numbers::pi / 2 - delta;
    if (x < r) continue;
    try {
      auto P = spike_simplex_spherical(d, eps, x);
      if (P.contains(c) && facet_clearance(P, c) >= r) {
        if (x_out) *x_out = x;
        return P;
      }
    } catch (const Error&) {
    }
  }
  throw Error(Errc::infeasible, "no spike simplex contains the ball");
}

/// T_reg inscribed in the unit circle and the thin isosceles T_iso with apex
/// (0, 1) and base on y = 1 - eps with its ends on the circle.
inline std::pair<Polytope, Polytope> annulus_triangles(double eps) {
  require(eps > 0 && eps < 1, Errc::invalid_input, "eps must be in (0, 1)");
  const Geometry g = Geometry::euclidean(2);
  auto pt = [&](double a, double b) {
    Vec v(2);
    v << a, b;
    return Point(g, v);
  };
  std::vector<Point> reg;
  for (int i = 0; i < 3; ++i) {
    const double a = std::numbers::pi / 2 + 2 * std::numbers::pi * i / 3;
    reg.push_back(pt(std::cos(a), std::sin(a)));
  }
  const double w = std::sqrt(2 * eps - eps * eps);
  return {Polytope::from_vertices(reg),
          Polytope::from_vertices({pt(0, 1), pt(-w, 1 - eps), pt(w, 1 - eps)})};
}

/// A candidate minimizer of total edge length among hyperbolic polytopes
/// with at most d+2 vertices containing a ball.
struct HHCandidate {
  std::string family;
  Polytope polytope;
  double tel = 0;
  std::vector<double> params;
};

namespace detail {

inline double golden_section(const std::function<double(double)>& f, double lo, double hi,
                             double* fbest, int iters = 120) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters && b - a > 1e-13 * (1 + std::abs(a)); ++i) {
    if (fc < fd) {
      b = d; d = c; fd = fc; c = b - r * (b - a); fc = f(c);
    } else {
      a = c; c = d; fc = fd; d = a + r * (b - a); fd = f(d);
    }
  }
  const double x = fc < fd ? c : d;
  if (fbest) *fbest = std::min(fc, fd);
  return x;
}

/// Smallest scale lambda with clearance(lambda) >= r. In H^d clearance is
/// not monotone in the scale (it peaks and then decays as vertices run off
/// towards the ideal boundary), so the peak is bracketed first and the
/// bisection runs on the rising branch only.
inline double smallest_feasible_scale(const std::function<double(double)>& clearance, double r,
                                      double hi_max = 12.0) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  // geometric scan for the first feasible scale or the peak
  double prev = 0.5 * r, fprev = clearance(prev);
  if (fprev >= r) {
    prev = 1e-4;
    fprev = clearance(prev);
  }
  double lam = prev, flam = fprev;
  for (;;) {
    lam *= 1.25;
    if (lam > hi_max) return nan;
    flam = clearance(lam);
    if (flam >= r) break;
    if (flam < fprev && fprev > 0) {
      // past the peak without reaching r; refine the peak once
      double fb;
      const auto neg = [&](double x) { return -clearance(x); };
      const double x = golden_section(neg, prev / 1.25, lam, &fb, 80);
      if (-fb < r) return nan;
      lam = x;
      flam = -fb;
      break;
    }
    prev = lam;
    fprev = flam;
  }
  // Illinois regula falsi on clearance - r over [prev, lam]
  double a = prev, fa = fprev - r, b = lam, fb = flam - r;
  if (fa >= 0) return a;
  int side = 0;
  for (int i = 0; i < 100 && b - a > 1e-14 * b; ++i) {
    double c = (a * fb - b * fa) / (fb - fa);
    if (!(c > a && c < b)) c = 0.5 * (a + b);
    const double fc = clearance(c) - r;
    if (fc >= 0) {
      b = c;
      fb = fc;
      if (side == 1) fa *= 0.5;
      side = 1;
    } else {
      a = c;
      fa = fc;
      if (side == -1) fb *= 0.5;
      side = -1;
    }
    if (fb < 1e-15) break;
  }
  return b;
}

/// Coordinate search: each coordinate is scanned on a grid around its
/// current value, then refined by golden section in the best grid cell.
/// Infinite values mark infeasible points.
inline double coordinate_search(const std::function<double(const std::vector<double>&)>& f,
                                std::vector<double>& x, double width, double stop) {
  double fx = f(x);
  const int grid = 8;
  while (width > stop) {
    const double before = fx;
    for (size_t j = 0; j < x.size(); ++j) {
      auto line = [&](double t) {
        auto y = x;
        y[j] = t;
        return f(y);
      };
      double bt = x[j], bf = fx;
      for (int i = 0; i <= grid; ++i) {
        const double t = x[j] - width + 2 * width * i / grid;
        const double v = line(t);
        if (v < bf) {
          bf = v;
          bt = t;
        }
      }
      const double h = 2 * width / grid;
      double gf;
      const double gt = golden_section(line, bt - h, bt + h, &gf, 16);
      if (gf < bf) {
        bf = gf;
        bt = gt;
      }
      if (bf < fx) {
        fx = bf;
        x[j] = bt;
      }
    }
    width *= before - fx < 1e-12 * (1 + std::abs(fx)) ? 0.3 : 0.6;
  }
  return fx;
}

inline double safe_clearance(const std::function<Polytope()>& build) {
  try {
    const Polytope P = build();
    const Point c = basepoint(P.geometry());
    if (!P.contains(c)) return -1.0;
    return facet_clearance(P, c);
  } catch (const Error&) {
    return -1.0;
  }
}

}  // namespace detail

/// Candidate (ii): segments S1 (along e1, half-length a1) and S2 (along e2,
/// half-length a2) with common midpoint q1 at distance s1 from the basepoint
/// along -e_d, and a regular simplex Q with d-2 vertices and circumradius rho
/// centred at q2 at distance s2 along +e_d, perpendicular to the axis.
inline Polytope hh_pyramid(int d, double s1, double s2, double a1, double a2, double rho) {
  require(d >= 3, Errc::invalid_input, "candidate needs d >= 3");
  const Geometry g = Geometry::hyperbolic(d);
  Vec ax = Vec::Zero(d);
  ax[d - 1] = 1.0;
  const Isometry T1 = translation(g, -s1 * ax);
  const Isometry T2 = translation(g, s2 * ax);
  std::vector<Point> v;
  for (int j = 0; j < 2; ++j) {
    for (double sgn : {-1.0, 1.0}) {
      Vec t = Vec::Zero(d);
      t[j] = sgn * (j == 0 ? a1 : a2);
      v.push_back(T1.apply(exp_base(g, t)));
    }
  }
  const int nq = d - 2;
  if (nq == 1) {
    v.push_back(T2.apply(basepoint(g)));
  } else {
    const Mat U = unit_regular_simplex(nq - 1);
    for (int i = 0; i < nq; ++i) {
      Vec t = Vec::Zero(d);
      t.segment(2, nq - 1) = U.col(i) * rho;
      v.push_back(T2.apply(exp_base(g, t)));
    }
  }
  return Polytope::from_vertices(std::move(v));
}

/// Candidate (i) in H^d: joins of regular simplices with circumradii R1, R2.
/// In the Klein chart each facet sits at Euclidean distance h from the
/// centre with 1/h^2 = 1/rho1^2 + 1/rho2^2, rho_i = tanh(R_i)/k_i.
inline double hh_join_tel(int d, int k, double R1, double R2) {
  const int m = d - k;
  const double e1 = regular_edge(Geometry::hyperbolic(k), R1);
  const double e2 = regular_edge(Geometry::hyperbolic(m), R2);
  const double cross = std::acosh(std::cosh(R1) * std::cosh(R2));
  return binomial(k + 1, 2) * e1 + binomial(m + 1, 2) * e2 + (k + 1.0) * (m + 1.0) * cross;
}

inline std::vector<HHCandidate> edgelength_HH_candidates(int d, const Ball& B) {
  const Geometry g = Geometry::hyperbolic(d);
  require(B.center.geometry() == g, Errc::geometry_mismatch, "ball must live in H^d");
  require(d >= 2, Errc::invalid_input, "d must be at least 2");
  const double r = B.radius;
  const double h = std::tanh(r);
  const Isometry place = to_basepoint(B.center).inverse();
  auto moved = [&](const Polytope& P) {
    std::vector<Point> v;
    for (const auto& x : P.vertices()) v.push_back(place.apply(x));
    return Polytope::from_vertices(std::move(v));
  };
  std::vector<HHCandidate> out;

  // (i) joins, minimized over rho1 with rho2 fixed by the touching condition
  for (int k = 1; k <= d / 2; ++k) {
    const int m = d - k;
    auto rho2_of = [&](double rho1) { return 1.0 / std::sqrt(1.0 / (h * h) - 1.0 / (rho1 * rho1)); };
    const double lo = h * (1 + 1e-9);
    double hi = 1.0 / k * (1 - 1e-12);
    // need rho2 < 1/m as well
    const double need = 1.0 / std::sqrt(1.0 / (h * h) - static_cast<double>(m) * m);
    if (!(1.0 / (h * h) > static_cast<double>(m) * m) ) continue;
    const double lo2 = std::max(lo, need * (1 + 1e-12));
    if (lo2 >= hi) continue;
    auto tel = [&](double rho1) {
      const double rho2 = rho2_of(rho1);
      if (!(rho2 < 1.0 / m) || !(rho1 < 1.0 / k)) return std::numeric_limits<double>::infinity();
      return hh_join_tel(d, k, std::atanh(k * rho1), std::atanh(m * rho2));
    };
    // coarse scan to bracket, then golden section
    const int grid = 400;
    double best_x = lo2, best_f = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= grid; ++i) {
      const double x = lo2 + (hi - lo2) * i / grid;
      const double f = tel(x);
      if (f < best_f) {
        best_f = f;
        best_x = x;
      }
    }
    const double step = (hi - lo2) / grid;
    double fb;
    const double rho1 = detail::golden_section(tel, std::max(lo2, best_x - step), std::min(hi, best_x + step), &fb);
    const double R1 = std::atanh(k * rho1), R2 = std::atanh(m * rho2_of(rho1));
    const Polytope P = moved(orthogonal_join(g, k, regular_inradius({g.space, k}, R1),
                                             regular_inradius({g.space, m}, R2)));
    out.push_back({"join k=" + std::to_string(k), P, total_edge_length(P), {R1, R2}});
  }

  // (ii) two segments through q1 and a simplex Q at q2
  if (d >= 3) {
    const int np = d >= 4 ? 4 : 3;
    // log-shape (s2, a1, a2, rho) relative to s1 = 1; a common scale is
    // fixed by the touching condition
    std::vector<double> theta(np, 0.0);
    theta[1] = 0.5;
    theta[2] = 0.5;
    auto build = [&](const std::vector<double>& th, double lam) {
      const double s2 = std::exp(th[0]) * lam, a1 = std::exp(th[1]) * lam, a2 = std::exp(th[2]) * lam;
      const double rho = np == 4 ? std::exp(th[3]) * lam : 0.0;
      return hh_pyramid(d, lam, s2, a1, a2, rho);
    };
    auto scale_for = [&](const std::vector<double>& th) {
      auto clr = [&](double lam) { return detail::safe_clearance([&] { return build(th, lam); }); };
      return detail::smallest_feasible_scale(clr, r);
    };
    auto objective = [&](const std::vector<double>& th) {
      const double lam = scale_for(th);
      if (!std::isfinite(lam)) return std::numeric_limits<double>::infinity();
      try {
        return total_edge_length(build(th, lam));
      } catch (const Error&) {
        return std::numeric_limits<double>::infinity();
      }
    };
    detail::coordinate_search(objective, theta, 1.0, 1e-6);
    const double lam = scale_for(theta);
    if (std::isfinite(lam)) {
      const Polytope P = moved(build(theta, lam));
      std::vector<double> params{lam, std::exp(theta[0]) * lam, std::exp(theta[1]) * lam,
                                 std::exp(theta[2]) * lam};
      if (np == 4) params.push_back(std::exp(theta[3]) * lam);
      out.push_back({"pyramid", P, total_edge_length(P), params});
    }
  }

  // (iii) regular simplex circumscribed about B
  if (d * h < 1.0) {
    const Polytope P = moved(regular_simplex(g, RegularBy::inradius, r));
    out.push_back({"regular", P, total_edge_length(P), {regular_circumradius(g, RegularBy::inradius, r)}});
  }
  return out;
}

}  // namespace isop
