#pragma once

#include "isop/polytope.hpp"
#include "isop/random.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <mutex>
#include <numbers>
#include <thread>
#include <utility>
#include <vector>

namespace isop {

/// Value with a standard error; the error is zero for exact methods.
struct Estimate {
  double value = 0;
  double std_error = 0;
};

struct MCConfig {
  std::uint64_t samples = 2'000'000;
  std::uint64_t seed = 0x5eed;
  int substreams = 16;  // strata, one RNG substream each
  int jobs = 1;
  double max_std_error = std::numeric_limits<double>::infinity();

  void validate() const {
    require(samples >= 1000, Errc::invalid_input, "Monte Carlo needs at least 1000 samples");
    require(substreams >= 1 && jobs >= 1, Errc::invalid_input, "substreams and jobs must be positive");
  }
};

enum class VolumeMethod { exact, monte_carlo, automatic };

/// Runs f(i) for i in [0, n) on up to `jobs` threads. Callers store results
/// by index, so the reduction order never depends on scheduling.
inline void parallel_for(int n, int jobs, const std::function<void(int)>& f) {
  jobs = std::max(1, std::min(jobs, n));
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr err;
  std::mutex mu;
  for (int t = 0; t < jobs; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (int i = t; i < n; i += jobs) f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!err) err = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

/// Volume of the unit sphere S^d.
inline double sphere_volume(int d) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * (d + 1)) / std::tgamma(0.5 * (d + 1));
}

/// Volume of the unit ball in E^d.
inline double unit_ball_volume(int d) {
  return std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

/// Exact volume of the convex hull of points spanning R^m; recursive cone
/// decomposition over facets about the vertex centroid.
inline double hull_volume_euclidean(const std::vector<Vec>& pts) {
  const int m = static_cast<int>(pts.front().size());
  if (m == 0) return 1.0;
  if (m == 1) {
    double lo = pts[0][0], hi = pts[0][0];
    for (const auto& p : pts) {
      lo = std::min(lo, p[0]);
      hi = std::max(hi, p[0]);
    }
    return hi - lo;
  }
  if (static_cast<int>(pts.size()) == m + 1) return simplex_volume(pts);
  Mat L(m + 1, pts.size());
  for (size_t i = 0; i < pts.size(); ++i) {
    L(0, i) = 1.0;
    L.col(i).tail(m) = pts[i];
    L.col(i) /= L.col(i).norm();
  }
  if (numeric_rank(L) < m + 1) return 0.0;
  Vec c = Vec::Zero(m);
  for (const auto& p : pts) c += p;
  c /= static_cast<double>(pts.size());
  double vol = 0;
  for (const auto& f : detail::cone_facets(L)) {
    const Vec s = f.functional.tail(m);
    const double ns = s.norm();
    const Vec n = s / ns;
    const double offset = -f.functional[0] / ns;
    const double h = n.dot(c) - offset;
    Mat nt = n.transpose();
    const Mat B = null_space(nt);
    std::vector<Vec> sub;
    for (int i : f.vertices) sub.push_back(B.transpose() * (pts[i] - pts[f.vertices[0]]));
    vol += h * hull_volume_euclidean(sub) / m;
  }
  return vol;
}

namespace detail {

/// Angle between two tangent vectors at a point of S^d or H^d.
inline double tangent_angle(Geometry g, Vec a, Vec b) {
  auto nrm = [&](const Vec& v) {
    return g.is_hyperbolic() ? std::sqrt(std::max(0.0, minkowski(v, v))) : v.norm();
  };
  a /= nrm(a);
  b /= nrm(b);
  return 2.0 * std::atan2(nrm(a - b), nrm(a + b));
}

/// Interior angle at v of the geodesic triangle v, a, b.
inline double vertex_angle(const Point& v, const Point& a, const Point& b) {
  const Geometry& g = v.geometry();
  const Vec& x = v.coords();
  if (g.is_euclidean()) return tangent_angle(g, a.coords() - x, b.coords() - x);
  if (g.is_spherical())
    return tangent_angle(g, a.coords() - a.coords().dot(x) * x, b.coords() - b.coords().dot(x) * x);
  return tangent_angle(g, a.coords() + minkowski(a.coords(), x) * x,
                       b.coords() + minkowski(b.coords(), x) * x);
}

/// Vertex indices of a polygon in cyclic order, read off its edge facets.
inline std::vector<int> polygon_cycle(const Polytope& P) {
  const int n = P.size();
  std::vector<std::vector<int>> adj(n);
  for (const auto& f : P.facets()) {
    require(f.vertices.size() == 2, Errc::degenerate, "polygon edge with collinear vertices");
    adj[f.vertices[0]].push_back(f.vertices[1]);
    adj[f.vertices[1]].push_back(f.vertices[0]);
  }
  std::vector<int> cyc{0};
  int prev = -1, cur = 0;
  for (int s = 1; s < n; ++s) {
    const int nxt = adj[cur][0] != prev ? adj[cur][0] : adj[cur][1];
    prev = cur;
    cur = nxt;
    cyc.push_back(cur);
  }
  return cyc;
}

}  // namespace detail

/// Area of a polygon in S^2 or H^2 from its angle sum (excess / defect).
inline double polygon_area_exact(const Polytope& P) {
  require(P.dim() == 2, Errc::unsupported, "angle-sum area needs a polygon");
  const auto cyc = detail::polygon_cycle(P);
  const int n = static_cast<int>(cyc.size());
  double sum = 0;
  for (int i = 0; i < n; ++i)
    sum += detail::vertex_angle(P.vertex(cyc[i]), P.vertex(cyc[(i + n - 1) % n]),
                                P.vertex(cyc[(i + 1) % n]));
  const double flat = (n - 2) * std::numbers::pi;
  switch (P.geometry().space) {
    case Space::spherical: return sum - flat;
    case Space::hyperbolic: return flat - sum;
    case Space::euclidean: {
      std::vector<Vec> pts;
      for (const auto& v : P.vertices()) pts.push_back(v.coords());
      return hull_volume_euclidean(pts);
    }
  }
  return 0;
}

/// Stratified antithetic Monte Carlo integral of the chart volume density
/// over the polytope's chart image.
inline Estimate mc_chart_volume(const Polytope& P, const MCConfig& cfg) {
  cfg.validate();
  const int d = P.dim();
  const Mat G = P.chart_inequalities();
  const auto cv = P.chart_vertices();
  Vec lo = cv[0], hi = cv[0];
  for (const auto& y : cv) {
    lo = lo.cwiseMin(y);
    hi = hi.cwiseMax(y);
  }
  const Chart& ch = P.chart();
  const int S = cfg.substreams;
  const std::uint64_t pairs = std::max<std::uint64_t>(1, cfg.samples / (2ull * S));
  const double slab = (hi[0] - lo[0]) / S;
  double box_rest = 1;
  for (int j = 1; j < d; ++j) box_rest *= hi[j] - lo[j];

  std::vector<double> est(S), var(S);
  parallel_for(S, cfg.jobs, [&](int s) {
    Rng rng = make_rng(cfg.seed, static_cast<std::uint64_t>(s));
    Vec a = lo, w = hi - lo;
    a[0] = lo[0] + s * slab;
    w[0] = slab;
    Vec y(d), y2(d), h(d + 1), h2(d + 1);
    h[0] = h2[0] = 1.0;
    double sum = 0, sum2 = 0;
    for (std::uint64_t p = 0; p < pairs; ++p) {
      for (int j = 0; j < d; ++j) {
        const double u = uniform01(rng);
        y[j] = a[j] + u * w[j];
        y2[j] = a[j] + (1.0 - u) * w[j];
      }
      h.tail(d) = y;
      h2.tail(d) = y2;
      const double f1 = (G * h).minCoeff() >= 0 ? ch.density(y) : 0.0;
      const double f2 = (G * h2).minCoeff() >= 0 ? ch.density(y2) : 0.0;
      const double m = 0.5 * (f1 + f2);
      sum += m;
      sum2 += m * m;
    }
    const double vol = slab * box_rest;
    const double mean = sum / pairs;
    const double v = std::max(0.0, sum2 / pairs - mean * mean) * pairs / std::max<double>(1, pairs - 1);
    est[s] = vol * mean;
    var[s] = vol * vol * v / pairs;
  });
  Estimate e;
  double v = 0;
  for (int s = 0; s < S; ++s) {
    e.value += est[s];
    v += var[s];
  }
  e.std_error = std::sqrt(v);
  require(e.std_error <= cfg.max_std_error, Errc::budget,
          "standard error " + std::to_string(e.std_error) + " above the configured bound");
  return e;
}

/// Volume by exact triangulation (E^d, and S^2 / H^2 by angle sums) or by
/// Monte Carlo in the chart. `automatic` picks exact where available.
inline Estimate polytope_volume(const Polytope& P, VolumeMethod method = VolumeMethod::automatic,
                                const MCConfig& cfg = {}) {
  const bool exact_ok = P.geometry().is_euclidean() || P.dim() == 2;
  if (method == VolumeMethod::exact)
    require(exact_ok, Errc::unsupported,
            "exact volume in " + geometry_name(P.geometry()) + " is only available for d = 2");
  if (method != VolumeMethod::monte_carlo && exact_ok) {
    if (P.geometry().is_euclidean()) {
      std::vector<Vec> pts;
      for (const auto& v : P.vertices()) pts.push_back(v.coords());
      return {hull_volume_euclidean(pts), 0.0};
    }
    return {polygon_area_exact(P), 0.0};
  }
  return mc_chart_volume(P, cfg);
}

/// The face `face` of P as a polytope in its own k-dimensional geometry.
inline Polytope face_polytope(const Polytope& P, const std::vector<int>& face) {
  const Geometry& g = P.geometry();
  std::vector<Vec> xs;
  for (int i : face) xs.push_back(P.vertex(i).coords());
  std::vector<Point> out;
  if (g.is_euclidean()) {
    Mat D(g.dim, face.size() - 1);
    for (size_t i = 1; i < face.size(); ++i) D.col(i - 1) = xs[i] - xs[0];
    Eigen::JacobiSVD<Mat> svd(D, Eigen::ComputeThinU);
    int r = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()[i] > tol::rank * svd.singularValues()[0]) ++r;
    const Mat B = svd.matrixU().leftCols(r);
    const Geometry sub = Geometry::euclidean(r);
    for (const auto& x : xs) out.push_back(Point(sub, B.transpose() * (x - xs[0])));
    return Polytope::from_vertices(std::move(out));
  }
  Mat D(g.dim + 1, face.size());
  for (size_t i = 0; i < face.size(); ++i) D.col(i) = xs[i];
  Eigen::JacobiSVD<Mat> svd(D, Eigen::ComputeThinU);
  int r = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] > tol::rank * svd.singularValues()[0]) ++r;
  Mat B = svd.matrixU().leftCols(r);
  const Geometry sub = g.is_spherical() ? Geometry::spherical(r - 1) : Geometry::hyperbolic(r - 1);
  if (g.is_hyperbolic()) {
    // Minkowski-orthonormal frame of the span, timelike vector first
    Vec c = Vec::Zero(g.dim + 1);
    for (const auto& x : xs) c += x;
    c /= std::sqrt(-minkowski(c, c));
    Mat F(g.dim + 1, r);
    F.col(0) = c;
    int filled = 1;
    for (int j = 0; j < r && filled < r; ++j) {
      Vec v = B.col(j);
      for (int i = 0; i < filled; ++i) {
        const double sgn = i == 0 ? -1.0 : 1.0;
        v -= sgn * minkowski(v, F.col(i)) * F.col(i);
      }
      const double q = minkowski(v, v);
      if (q > 1e-12) F.col(filled++) = v / std::sqrt(q);
    }
    for (const auto& x : xs) {
      Vec y(r);
      y[0] = -minkowski(x, F.col(0));
      for (int i = 1; i < r; ++i) y[i] = minkowski(x, F.col(i));
      out.push_back(Point::projected(sub, y));
    }
  } else {
    for (const auto& x : xs) out.push_back(Point::projected(sub, B.transpose() * x));
  }
  return Polytope::from_vertices(std::move(out));
}

/// Total k-dimensional content of the k-skeleton: vertex count for k = 0,
/// total edge length for k = 1, summed face volumes above.
inline Estimate k_content(const Polytope& P, int k, VolumeMethod method = VolumeMethod::automatic,
                          const MCConfig& cfg = {}) {
  require(k >= 0 && k <= P.dim(), Errc::invalid_input, "k out of range");
  if (k == P.dim()) return polytope_volume(P, method, cfg);
  const auto faces = faces_k(P, k);
  if (k == 0) return {static_cast<double>(faces.size()), 0.0};
  Estimate e;
  double var = 0;
  for (const auto& f : faces) {
    if (k == 1) {
      e.value += distance(P.vertex(f[0]), P.vertex(f[1]));
      continue;
    }
    if (P.geometry().is_euclidean() && static_cast<int>(f.size()) == k + 1) {
      std::vector<Vec> pts;
      for (int i : f) pts.push_back(P.vertex(i).coords());
      e.value += simplex_volume(pts);
      continue;
    }
    const Estimate fe = polytope_volume(face_polytope(P, f), method, cfg);
    e.value += fe.value;
    var += fe.std_error * fe.std_error;
  }
  e.std_error = std::sqrt(var);
  return e;
}

/// Total edge length.
inline double total_edge_length(const Polytope& P) { return k_content(P, 1).value; }

/// Radial weight rho(tau) of distance from the origin, with its support.
struct DensityFn {
  enum class Kind { constant, gaussian, power, annulus, tabulated };
  Kind kind = Kind::constant;
  double param = 1.0;
  double norm = 1.0;
  double support_lo = 0.0;
  double support_hi = std::numeric_limits<double>::infinity();
  std::vector<std::pair<double, double>> table;

  static DensityFn make(Kind k, double p) {
    DensityFn f;
    f.kind = k;
    f.param = p;
    return f;
  }

  static DensityFn constant(double c = 1.0) { return make(Kind::constant, c); }

  /// Standard normal density of E^d.
  static DensityFn gaussian(int d) {
    DensityFn f = make(Kind::gaussian, 1.0);
    f.norm = std::pow(2.0 * std::numbers::pi, -0.5 * d);
    return f;
  }

  /// tau^alpha, alpha >= 0 (increasing).
  static DensityFn power(double alpha) {
    require(alpha >= 0, Errc::invalid_input, "power density needs alpha >= 0");
    return make(Kind::power, alpha);
  }

  /// Indicator of 1 - eps <= tau <= 1.
  static DensityFn annulus(double eps) {
    require(eps > 0 && eps <= 1, Errc::invalid_input, "annulus width must be in (0, 1]");
    DensityFn f = make(Kind::annulus, eps);
    f.support_lo = 1.0 - eps;
    f.support_hi = 1.0;
    return f;
  }

  /// Piecewise-linear through (tau, rho) knots, zero outside them.
  static DensityFn tabulated(std::vector<std::pair<double, double>> knots) {
    require(knots.size() >= 2, Errc::invalid_input, "tabulated density needs two knots");
    std::sort(knots.begin(), knots.end());
    DensityFn f = make(Kind::tabulated, 0.0);
    f.support_lo = knots.front().first;
    f.support_hi = knots.back().first;
    f.table = std::move(knots);
    return f;
  }

  double operator()(double tau) const {
    switch (kind) {
      case Kind::constant: return param;
      case Kind::gaussian: return norm * std::exp(-0.5 * tau * tau);
      case Kind::power: return std::pow(tau, param);
      case Kind::annulus: return (tau >= 1.0 - param && tau <= 1.0) ? 1.0 : 0.0;
      case Kind::tabulated: {
        if (tau < support_lo || tau > support_hi) return 0.0;
        auto it = std::lower_bound(table.begin(), table.end(), std::make_pair(tau, -1e300));
        if (it == table.begin()) return it->second;
        const auto& [t1, r1] = *it;
        const auto& [t0, r0] = *(it - 1);
        return r0 + (r1 - r0) * (tau - t0) / (t1 - t0);
      }
    }
    return 0;
  }

  bool non_increasing() const {
    if (kind == Kind::constant || kind == Kind::gaussian) return true;
    if (kind == Kind::tabulated) {
      for (size_t i = 1; i < table.size(); ++i)
        if (table[i].second > table[i - 1].second) return false;
      return true;
    }
    return false;
  }
};

/// Integral of rho(|x|) over a Euclidean polytope. Radial shells over the
/// support, radius drawn uniform in volume within each shell, direction
/// from normalized Gaussians (rotated by `frame` if given), antithetic pairs.
inline Estimate density_integral(const Polytope& P, const DensityFn& rho, const MCConfig& cfg,
                                 double R0 = std::numeric_limits<double>::infinity(),
                                 const Mat* frame = nullptr) {
  cfg.validate();
  require(P.geometry().is_euclidean(), Errc::geometry_mismatch, "density integral is over E^d");
  const int d = P.dim();
  double rmax = 0;
  for (const auto& v : P.vertices()) rmax = std::max(rmax, v.coords().norm());
  require(rmax <= R0, Errc::invalid_input, "polytope reaches beyond the density's radial domain");
  const double a0 = std::max(0.0, rho.support_lo);
  const double b0 = std::min(rmax, rho.support_hi);
  if (b0 <= a0) return {0.0, 0.0};

  Mat F(P.facets().size(), d + 1);
  for (size_t i = 0; i < P.facets().size(); ++i) F.row(i) = P.facets()[i].functional.transpose();
  const int S = cfg.substreams;
  const std::uint64_t pairs = std::max<std::uint64_t>(1, cfg.samples / (2ull * S));
  const double omega = 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);

  std::vector<double> est(S), var(S);
  parallel_for(S, cfg.jobs, [&](int s) {
    Rng rng = make_rng(cfg.seed, static_cast<std::uint64_t>(s));
    const double a = a0 + (b0 - a0) * s / S;
    const double b = a0 + (b0 - a0) * (s + 1) / S;
    const double ad = std::pow(a, d), bd = std::pow(b, d);
    const double shell = omega * (bd - ad) / d;
    Vec h(d + 1);
    h[0] = 1.0;
    auto eval = [&](double r, const Vec& dir) {
      h.tail(d) = r * dir;
      const double m = (F * h).minCoeff();
      return m >= -tol::facet * h.norm() ? rho(r) : 0.0;
    };
    double sum = 0, sum2 = 0;
    for (std::uint64_t p = 0; p < pairs; ++p) {
      const double u = uniform01(rng);
      Vec g = random_unit(rng, d);
      if (frame) g = *frame * g;
      const double r1 = std::pow(ad + u * (bd - ad), 1.0 / d);
      const double r2 = std::pow(ad + (1.0 - u) * (bd - ad), 1.0 / d);
      const double m = 0.5 * (eval(r1, g) + eval(r2, -g));
      sum += m;
      sum2 += m * m;
    }
    const double mean = sum / pairs;
    const double v = std::max(0.0, sum2 / pairs - mean * mean) * pairs / std::max<double>(1, pairs - 1);
    est[s] = shell * mean;
    var[s] = shell * shell * v / pairs;
  });
  Estimate e;
  double v = 0;
  for (int s = 0; s < S; ++s) {
    e.value += est[s];
    v += var[s];
  }
  e.std_error = std::sqrt(v);
  require(e.std_error <= cfg.max_std_error, Errc::budget, "standard error above the configured bound");
  return e;
}

namespace detail {

using Tri = std::array<Eigen::Vector3d, 3>;

inline std::vector<Tri> build_icosphere(int level) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Eigen::Vector3d> v = {{-1, t, 0}, {1, t, 0},  {-1, -t, 0}, {1, -t, 0},
                                    {0, -1, t}, {0, 1, t},  {0, -1, -t}, {0, 1, -t},
                                    {t, 0, -1}, {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
  for (auto& x : v) x.normalize();
  const int f[20][3] = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                        {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                        {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                        {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  std::vector<Tri> tris;
  for (auto& tri : f) tris.push_back({v[tri[0]], v[tri[1]], v[tri[2]]});
  for (int l = 0; l < level; ++l) {
    std::vector<Tri> next;
    next.reserve(tris.size() * 4);
    for (const auto& [a, b, c] : tris) {
      const Eigen::Vector3d ab = (a + b).normalized(), bc = (b + c).normalized(), ca = (c + a).normalized();
      next.push_back({a, ab, ca});
      next.push_back({ab, b, bc});
      next.push_back({ca, bc, c});
      next.push_back({ab, bc, ca});
    }
    tris = std::move(next);
  }
  return tris;
}

inline const std::vector<Tri>& icosphere(int level) {
  static const std::vector<Tri> mesh = build_icosphere(6);
  require(level == 6, Errc::unsupported, "only the level-6 icosphere is cached");
  return mesh;
}

/// Spherical triangle area (Van Oosterom and Strackee).
inline double spherical_triangle_area(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                                      const Eigen::Vector3d& c) {
  const double num = std::abs(a.dot(b.cross(c)));
  const double den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
  return 2.0 * std::atan2(num, den);
}

}  // namespace detail

/// Integral over S^2 of rho(distance to the nearest p_i). Level-6 icosphere
/// with the edge-midpoint rule; triangles whose corners have different
/// nearest points are split once more.
inline double sphere_voronoi_moment(const std::vector<Point>& pts,
                                    const std::function<double(double)>& rho) {
  require(!pts.empty(), Errc::invalid_input, "need at least one point");
  const Geometry s2 = Geometry::spherical(2);
  std::vector<Vec> P;
  for (const auto& p : pts) {
    require_same(s2, p.geometry());
    P.push_back(p.coords());
  }
  // no closed hemisphere may contain all points: the origin must be strictly
  // inside their convex hull
  bool inside = false;
  try {
    std::vector<Point> e3;
    for (const auto& x : P) e3.push_back(Point(Geometry::euclidean(3), x));
    const auto hull = Polytope::hull_of(e3);
    const Point o(Geometry::euclidean(3), Vec::Zero(3));
    inside = hull.size() == static_cast<int>(P.size()) && hull.contains(o, -1e-9);
  } catch (const Error&) {
    inside = false;
  }
  require(inside, Errc::hemisphere, "points lie in a closed hemisphere");

  auto nearest = [&](const Eigen::Vector3d& x, double* tau) {
    int best = 0;
    double bd = -2;
    for (size_t i = 0; i < P.size(); ++i) {
      const double c = x.dot(P[i].head<3>());
      if (c > bd) {
        bd = c;
        best = static_cast<int>(i);
      }
    }
    if (tau) {
      // chord form keeps accuracy near the sites
      const double chord = (x - P[best].head<3>()).norm();
      *tau = 2.0 * std::asin(std::min(1.0, 0.5 * chord));
    }
    return best;
  };
  auto f = [&](const Eigen::Vector3d& x) {
    double tau;
    nearest(x, &tau);
    return rho(tau);
  };
  auto rule = [&](const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& c) {
    const double area = detail::spherical_triangle_area(a, b, c);
    return area * (f((a + b).normalized()) + f((b + c).normalized()) + f((c + a).normalized())) / 3.0;
  };
  double sum = 0;
  for (const auto& [a, b, c] : detail::icosphere(6)) {
    const int na = nearest(a, nullptr), nb = nearest(b, nullptr), nc = nearest(c, nullptr);
    if (na == nb && nb == nc) {
      sum += rule(a, b, c);
    } else {
      const Eigen::Vector3d ab = (a + b).normalized(), bc = (b + c).normalized(), ca = (c + a).normalized();
      sum += rule(a, ab, ca) + rule(ab, b, bc) + rule(ca, bc, c) + rule(ab, bc, ca);
    }
  }
  return sum;
}

/// Polar of a spherical simplex, {x : <x, v> <= 0 for every vertex v},
/// generated by the normalized columns of -V^{-T}.
inline Polytope spherical_polar_dual(const Polytope& P) {
  require(P.geometry().is_spherical(), Errc::geometry_mismatch, "polar dual is defined in S^d");
  require(P.is_simplex(), Errc::unsupported, "polar dual implemented for simplices");
  const int D = P.dim() + 1;
  Mat V(D, D);
  for (int i = 0; i < D; ++i) V.col(i) = P.vertex(i).coords();
  const Mat W = -V.transpose().inverse();
  std::vector<Point> out;
  for (int j = 0; j < D; ++j) out.push_back(Point(P.geometry(), W.col(j) / W.col(j).norm()));
  return Polytope::from_vertices(std::move(out));
}

/// Solid-angle deficit 1/2 - vol(P*) / vol(S^d) of a spherical simplex.
inline Estimate u1(const Polytope& P, const MCConfig& cfg = {}) {
  const Estimate dual = polytope_volume(spherical_polar_dual(P), VolumeMethod::automatic, cfg);
  const double s = sphere_volume(P.dim());
  return {0.5 - dual.value / s, dual.std_error / s};
}

}  // namespace isop
