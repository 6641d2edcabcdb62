#pragma once

#include "isop/geometry.hpp"
#include "isop/linalg.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <vector>

namespace isop {

/// Facet of a polytope as a unit linear functional on lifted coordinates,
/// nonnegative on the polytope, with the indices of its vertices.
struct Facet {
  Vec functional;
  std::vector<int> vertices;
};

namespace detail {

/// Unit-normalized lifts as columns.
inline Mat lifted_matrix(const std::vector<Point>& pts) {
  const int n = static_cast<int>(pts.size());
  Mat L(pts.front().geometry().dim + 1, n);
  for (int i = 0; i < n; ++i) {
    const Vec l = lift(pts[i]);
    L.col(i) = l / l.norm();
  }
  return L;
}

/// Facets of the cone spanned by the columns of L (assumed pointed and
/// full-dimensional), by checking every hyperplane through rows-1 columns.
inline std::vector<Facet> cone_facets(const Mat& L, double eps = tol::facet) {
  const int D = static_cast<int>(L.rows());
  const int n = static_cast<int>(L.cols());
  std::vector<Facet> out;
  std::set<std::vector<int>> seen;
  for_each_combination(n, D - 1, [&](const std::vector<int>& sub) {
    Mat S(D - 1, D);
    for (int i = 0; i < D - 1; ++i) S.row(i) = L.col(sub[i]).transpose();
    const Mat ns = null_space(S);
    if (ns.cols() != 1) return true;
    Vec f = ns.col(0);
    const Vec s = L.transpose() * f;
    if (s.minCoeff() >= -eps) {
    } else if (s.maxCoeff() <= eps) {
      f = -f;
    } else {
      return true;
    }
    std::vector<int> inc;
    for (int j = 0; j < n; ++j)
      if (std::abs(s[j]) <= eps) inc.push_back(j);
    if (seen.insert(inc).second) {
      // refit the functional on the full incidence set for accuracy
      if (static_cast<int>(inc.size()) > D - 1) {
        Mat F(inc.size(), D);
        for (size_t i = 0; i < inc.size(); ++i) F.row(i) = L.col(inc[i]).transpose();
        Eigen::JacobiSVD<Mat> svd(F, Eigen::ComputeFullV);
        Vec g = svd.matrixV().col(D - 1);
        if (g.dot(f) < 0) g = -g;
        f = g;
      }
      out.push_back({f / f.norm(), std::move(inc)});
    }
    return true;
  });
  return out;
}

/// Maximizes min_i <c, v_i> over the box |c_j| <= 1. Positive optimum means
/// all v_i lie in an open hemisphere, with c its centre direction.
inline std::pair<double, Vec> hemisphere_center(const std::vector<Vec>& vs) {
  const int D = static_cast<int>(vs.front().size());
  const int n = static_cast<int>(vs.size());
  // variables c+ (D), c- (D), t (1)
  Mat A = Mat::Zero(n + 2 * D + 1, 2 * D + 1);
  Vec b = Vec::Zero(n + 2 * D + 1);
  for (int i = 0; i < n; ++i) {
    A.block(i, 0, 1, D) = -vs[i].transpose();
    A.block(i, D, 1, D) = vs[i].transpose();
    A(i, 2 * D) = 1.0;
  }
  for (int j = 0; j < D; ++j) {
    A(n + j, j) = 1.0;
    A(n + j, D + j) = -1.0;
    b[n + j] = 1.0;
    A(n + D + j, j) = -1.0;
    A(n + D + j, D + j) = 1.0;
    b[n + D + j] = 1.0;
  }
  A(n + 2 * D, 2 * D) = 1.0;
  b[n + 2 * D] = 1.0;
  Vec c = Vec::Zero(2 * D + 1);
  c[2 * D] = 1.0;
  const LpResult r = lp_maximize(A, b, c);
  const Vec dir = r.x.head(D) - r.x.segment(D, D);
  return {r.value, dir};
}

}  // namespace detail

/// Convex polytope given by its vertices. Construction validates convex
/// position and full dimension and caches the facets, so every instance is
/// a minimal vertex description.
class Polytope {
 public:
  /// Strict: every point must be a vertex.
  static Polytope from_vertices(std::vector<Point> pts) {
    Polytope p;
    p.init(std::move(pts));
    for (int i = 0; i < p.size(); ++i) {
      require(p.is_extreme(i), Errc::degenerate,
              "point " + std::to_string(i) + " is not a vertex of the hull");
    }
    return p;
  }

  /// Keeps only the extreme points of `pts`.
  static Polytope hull_of(std::vector<Point> pts) {
    std::vector<Point> uniq;
    for (auto& q : pts) {
      bool dup = false;
      for (const auto& u : uniq)
        if ((u.coords() - q.coords()).norm() < 1e-12) dup = true;
      if (!dup) uniq.push_back(std::move(q));
    }
    Polytope p;
    p.init(uniq);
    std::vector<Point> keep;
    for (int i = 0; i < p.size(); ++i)
      if (p.is_extreme(i)) keep.push_back(p.vertices_[i]);
    if (static_cast<int>(keep.size()) == p.size()) return p;
    return from_vertices(std::move(keep));
  }

  const Geometry& geometry() const { return g_; }
  int dim() const { return g_.dim; }
  int size() const { return static_cast<int>(vertices_.size()); }
  const std::vector<Point>& vertices() const { return vertices_; }
  const Point& vertex(int i) const { return vertices_.at(i); }
  const Mat& lifted() const { return lifted_; }
  const std::vector<Facet>& facets() const { return facets_; }
  const Chart& chart() const { return chart_; }
  bool is_simplex() const { return size() == dim() + 1; }

  /// Facet hyperplane with the normal pointing into the polytope.
  Hyperplane facet_hyperplane(int f) const {
    return hyperplane_from_functional(g_, facets_.at(f).functional);
  }

  bool contains(const Point& p, double eps = tol::facet) const {
    require_same(g_, p.geometry());
    Vec l = lift(p);
    l /= l.norm();
    for (const auto& f : facets_)
      if (f.functional.dot(l) < -eps) return false;
    return true;
  }

  std::vector<Vec> chart_vertices() const {
    std::vector<Vec> out;
    for (const auto& v : vertices_) out.push_back(chart_.to_chart(v));
    return out;
  }

  /// Chart-coordinate inequalities G [1; y] >= 0, one row per facet.
  Mat chart_inequalities() const {
    const int D = dim() + 1;
    Mat G(facets_.size(), D);
    // f . x >= 0 with x proportional to chart_lift(y), which is affine in (1, y)
    Mat basis(D, D);
    for (int j = 0; j < D; ++j) {
      Vec y = Vec::Zero(dim());
      if (j > 0) y[j - 1] = 1.0;
      basis.col(j) = chart_.chart_lift(y);
    }
    for (int j = 1; j < D; ++j) basis.col(j) -= basis.col(0);
    for (size_t i = 0; i < facets_.size(); ++i) G.row(i) = facets_[i].functional.transpose() * basis;
    return G;
  }

  /// All faces of dimension k as sorted vertex-index sets, obtained from
  /// intersections of facet vertex sets.
  std::vector<std::vector<int>> faces_hull(int k) const {
    std::set<std::vector<int>> all;
    for (const auto& f : facets_) all.insert(f.vertices);
    std::vector<std::vector<int>> frontier(all.begin(), all.end());
    while (!frontier.empty()) {
      std::vector<std::vector<int>> next;
      for (const auto& a : frontier) {
        for (const auto& f : facets_) {
          std::vector<int> c;
          std::set_intersection(a.begin(), a.end(), f.vertices.begin(), f.vertices.end(),
                                std::back_inserter(c));
          if (!c.empty() && all.insert(c).second) next.push_back(c);
        }
      }
      frontier = std::move(next);
    }
    std::vector<std::vector<int>> out;
    for (const auto& s : all) {
      Mat cols(lifted_.rows(), s.size());
      for (size_t i = 0; i < s.size(); ++i) cols.col(i) = lifted_.col(s[i]);
      if (numeric_rank(cols, 1e-9) == k + 1) out.push_back(s);
    }
    return out;
  }

 private:
  Polytope() = default;

  void init(std::vector<Point> pts) {
    require(!pts.empty(), Errc::invalid_input, "polytope needs vertices");
    g_ = pts.front().geometry();
    for (const auto& p : pts) require_same(g_, p.geometry());
    require(static_cast<int>(pts.size()) >= g_.dim + 1, Errc::degenerate,
            "fewer than d+1 points cannot span " + geometry_name(g_));
    for (size_t i = 0; i < pts.size(); ++i)
      for (size_t j = i + 1; j < pts.size(); ++j)
        require((pts[i].coords() - pts[j].coords()).norm() > 1e-12, Errc::degenerate,
                "duplicate vertices " + std::to_string(i) + " and " + std::to_string(j));
    vertices_ = std::move(pts);

    if (g_.is_spherical()) {
      std::vector<Vec> vs;
      for (const auto& p : vertices_) vs.push_back(p.coords());
      const auto [t, c] = detail::hemisphere_center(vs);
      require(t > tol::domain, Errc::hemisphere, "vertices are not in an open hemisphere");
      hemisphere_dir_ = c / c.norm();
    }

    lifted_ = detail::lifted_matrix(vertices_);
    require(numeric_rank(lifted_) == g_.dim + 1, Errc::degenerate,
            "vertices do not span " + geometry_name(g_));
    facets_ = detail::cone_facets(lifted_);
    require(static_cast<int>(facets_.size()) >= g_.dim + 1, Errc::degenerate,
            "facet enumeration found too few facets");
    chart_ = make_chart();
  }

  bool is_extreme(int i) const {
    std::vector<Vec> normals;
    for (const auto& f : facets_)
      if (std::binary_search(f.vertices.begin(), f.vertices.end(), i)) normals.push_back(f.functional);
    if (static_cast<int>(normals.size()) < g_.dim) return false;
    Mat N(normals.size(), g_.dim + 1);
    for (size_t r = 0; r < normals.size(); ++r) N.row(r) = normals[r].transpose();
    return numeric_rank(N, 1e-9) == g_.dim;
  }

  Chart make_chart() const {
    if (g_.is_euclidean()) return Chart(g_);
    Vec c = Vec::Zero(g_.dim + 1);
    for (const auto& v : vertices_) c += v.coords();
    if (g_.is_hyperbolic()) return Chart(point_from_lift(g_, c));
    c /= c.norm();
    double worst = 1.0;
    for (const auto& v : vertices_) worst = std::min(worst, c.dot(v.coords()));
    // clustered-plus-far vertex sets (spikes) push the centroid towards the
    // hemisphere boundary; the max-min direction is safer there
    if (worst < 0.2) c = hemisphere_dir_;
    return Chart(Point(g_, c));
  }

  Geometry g_;
  std::vector<Point> vertices_;
  Mat lifted_;
  std::vector<Facet> facets_;
  Vec hemisphere_dir_;
  Chart chart_{Geometry{}};
};

/// Signs of the affine dependence of d+2 points: I1 (negative labels),
/// I2 (positive), I0 (zero), with the common point of conv(I1) and conv(I2).
struct RadonSplit {
  std::vector<int> I1, I2, I0;
  Vec coefficients;
  Point point;

  bool proper() const { return I1.size() >= 2 && I2.size() >= 2; }
  bool simplicial() const { return proper() && I0.empty(); }
};

inline RadonSplit radon_split(Geometry g, const std::vector<Point>& pts) {
  require(static_cast<int>(pts.size()) == g.dim + 2, Errc::invalid_input,
          "Radon split needs exactly d+2 points");
  for (const auto& p : pts) require_same(g, p.geometry());
  const Mat L = detail::lifted_matrix(pts);
  const Mat ker = null_space(L);
  require(ker.cols() == 1, Errc::degenerate, "affine dependence is not one-dimensional");
  Vec c = ker.col(0);
  const double big = c.cwiseAbs().maxCoeff();
  RadonSplit s;
  std::vector<int> neg, pos;
  for (int i = 0; i < c.size(); ++i) {
    if (std::abs(c[i]) < tol::radon_zero * big) {
      c[i] = 0;
      s.I0.push_back(i);
    } else {
      (c[i] < 0 ? neg : pos).push_back(i);
    }
  }
  require(!neg.empty() && !pos.empty(), Errc::degenerate, "points are not in convex position");
  // smaller side first, ties broken by lowest index
  const bool swap = neg.size() > pos.size() || (neg.size() == pos.size() && pos.front() < neg.front());
  if (swap) {
    std::swap(neg, pos);
    c = -c;
  }
  s.I1 = neg;
  s.I2 = pos;
  s.coefficients = c;
  Vec acc = Vec::Zero(L.rows());
  for (int i : s.I2) acc += c[i] * L.col(i);
  s.point = point_from_lift(g, acc);
  return s;
}

inline RadonSplit radon_split(const Polytope& P) { return radon_split(P.geometry(), P.vertices()); }

/// One-dimensional Gale diagram of d+2 points: labels -1, 0, +1 per vertex.
struct GaleDiagram {
  std::vector<int> value;

  static GaleDiagram from_split(const RadonSplit& s) {
    GaleDiagram g;
    g.value.assign(s.I1.size() + s.I2.size() + s.I0.size(), 0);
    for (int i : s.I1) g.value[i] = -1;
    for (int i : s.I2) g.value[i] = +1;
    return g;
  }

  /// Multiplicities (k1+1, r, k2+1) of -1, 0, +1 in vertex order.
  static GaleDiagram from_multiplicities(int minus, int zero, int plus) {
    require(minus >= 2 && plus >= 2 && zero >= 0, Errc::invalid_input,
            "Gale diagram needs at least two -1 and two +1 labels");
    GaleDiagram g;
    g.value.insert(g.value.end(), minus, -1);
    g.value.insert(g.value.end(), zero, 0);
    g.value.insert(g.value.end(), plus, +1);
    return g;
  }

  int size() const { return static_cast<int>(value.size()); }
  int count(int label) const { return static_cast<int>(std::count(value.begin(), value.end(), label)); }
};

/// F is a face iff 0 is in the relative interior of the complement's labels.
inline bool gale_is_face(const GaleDiagram& gd, const std::vector<int>& face) {
  std::vector<bool> in(gd.size(), false);
  for (int i : face) in.at(i) = true;
  bool any = false, neg = false, pos = false, nonzero = false;
  for (int i = 0; i < gd.size(); ++i) {
    if (in[i]) continue;
    any = true;
    if (gd.value[i] < 0) neg = true;
    if (gd.value[i] > 0) pos = true;
    if (gd.value[i] != 0) nonzero = true;
  }
  if (!any) return false;
  return (neg && pos) || !nonzero;
}

/// Dimension of a face F of a (d+2)-vertex polytope from its Gale labels.
inline int gale_face_dim(const GaleDiagram& gd, const std::vector<int>& face) {
  std::vector<bool> in(gd.size(), false);
  for (int i : face) in.at(i) = true;
  bool support_inside = true;
  for (int i = 0; i < gd.size(); ++i)
    if (gd.value[i] != 0 && !in[i]) support_inside = false;
  return static_cast<int>(face.size()) - 1 - (support_inside ? 1 : 0);
}

inline std::vector<std::vector<int>> gale_faces(const GaleDiagram& gd, int k) {
  std::vector<std::vector<int>> out;
  const int n = gd.size();
  for (int m = 1; m <= n; ++m) {
    for_each_combination(n, m, [&](const std::vector<int>& f) {
      if (gale_is_face(gd, f) && gale_face_dim(gd, f) == k) out.push_back(f);
      return true;
    });
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// k-faces by vertex index: all subsets for simplices, the Gale diagram for
/// d+2 vertices, facet intersections otherwise.
inline std::vector<std::vector<int>> faces_k(const Polytope& P, int k) {
  require(k >= 0 && k < P.dim(), Errc::invalid_input, "face dimension out of range");
  std::vector<std::vector<int>> out;
  if (P.is_simplex()) {
    for_each_combination(P.size(), k + 1, [&](const std::vector<int>& f) {
      out.push_back(f);
      return true;
    });
    return out;
  }
  if (P.size() == P.dim() + 2) return gale_faces(GaleDiagram::from_split(radon_split(P)), k);
  out = P.faces_hull(k);
  std::sort(out.begin(), out.end());
  return out;
}

/// Hyperplane through every vertex except i and j that meets the segment
/// [v_i, v_j]. Unique when the rest spans a hyperplane; otherwise the one
/// through the midpoint of v_i v_j is chosen. Empty if none exists.
inline std::optional<Hyperplane> hyperplane_through_rest(const Polytope& P, int i, int j) {
  const Geometry& g = P.geometry();
  const Mat& L = P.lifted();
  const int D = g.dim + 1;
  std::vector<int> rest;
  for (int t = 0; t < P.size(); ++t)
    if (t != i && t != j) rest.push_back(t);
  Mat R(rest.size(), D);
  for (size_t r = 0; r < rest.size(); ++r) R.row(r) = L.col(rest[r]).transpose();
  Mat ns = rest.empty() ? Mat(Mat::Identity(D, D)) : null_space(R);
  if (ns.cols() == 0) return std::nullopt;
  Vec f;
  if (ns.cols() == 1) {
    f = ns.col(0);
  } else {
    Vec m = lift(midpoint(P.vertex(i), P.vertex(j)));
    m /= m.norm();
    Mat Rm(rest.size() + 1, D);
    if (!rest.empty()) Rm.topRows(rest.size()) = R;
    Rm.row(rest.size()) = m.transpose();
    const Mat ns2 = null_space(Rm);
    f = ns2.cols() > 0 ? Vec(ns2.col(0)) : Vec(ns.col(0));
  }
  const double a = f.dot(L.col(i));
  const double b = f.dot(L.col(j));
  const bool crosses = (a <= tol::facet && b >= -tol::facet) || (a >= -tol::facet && b <= tol::facet);
  if (!crosses) return std::nullopt;
  if (g.is_hyperbolic()) {
    Vec u = flip_time(f);
    if (minkowski(u, u) <= 0) return std::nullopt;
  }
  return hyperplane_from_functional(g, f);
}

inline Hyperplane separating_hyperplane_through_rest(const Polytope& P, int i, int j) {
  auto h = hyperplane_through_rest(P, i, j);
  require(h.has_value(), Errc::hypothesis,
          "no hyperplane through the other vertices meets [v" + std::to_string(i) + ", v" +
              std::to_string(j) + "]");
  return *h;
}

/// For every k-face through v_i but not v_j, swapping i for j gives a
/// k-face, and vice versa.
inline bool face_pairing_holds(const Polytope& P, int i, int j, int k) {
  const auto faces = faces_k(P, k);
  std::set<std::vector<int>> fs(faces.begin(), faces.end());
  auto swap_in = [&](std::vector<int> f, int from, int to) {
    std::replace(f.begin(), f.end(), from, to);
    std::sort(f.begin(), f.end());
    return f;
  };
  for (const auto& f : faces) {
    const bool hi = std::binary_search(f.begin(), f.end(), i);
    const bool hj = std::binary_search(f.begin(), f.end(), j);
    if (hi && !hj && !fs.count(swap_in(f, i, j))) return false;
    if (hj && !hi && !fs.count(swap_in(f, j, i))) return false;
  }
  return true;
}

}  // namespace isop
