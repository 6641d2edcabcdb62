#include "isop/balls.hpp"
#include "isop/measures.hpp"
#include "isop/random.hpp"
#include "isop/steiner.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace isop;
using isop::testing::e_vec;

namespace {

Point E(std::initializer_list<double> xs) {
  Vec v(xs.size());
  int i = 0;
  for (double x : xs) v[i++] = x;
  return Point(Geometry::euclidean(static_cast<int>(xs.size())), v);
}

double shoelace(const std::vector<Vec>& p) {
  double a = 0;
  for (size_t i = 0; i < p.size(); ++i) {
    const Vec& u = p[i];
    const Vec& w = p[(i + 1) % p.size()];
    a += u[0] * w[1] - u[1] * w[0];
  }
  return 0.5 * std::abs(a);
}

/// Random polytope with n vertices for which the edge (0, 1) satisfies the
/// hyperplane hypothesis.
Polytope random_admissible(Rng& rng, Geometry g, int n, double radius) {
  for (;;) {
    try {
      const auto P = Polytope::from_vertices(random_points(rng, g, n, radius));
      if (hyperplane_through_rest(P, 0, 1)) return P;
    } catch (const Error&) {
    }
  }
}

bool same_vertex_set(const Polytope& A, const Polytope& B, double tol) {
  if (A.size() != B.size()) return false;
  for (const auto& a : A.vertices()) {
    bool found = false;
    for (const auto& b : B.vertices()) found = found || (a.coords() - b.coords()).norm() < tol;
    if (!found) return false;
  }
  return true;
}

std::function<bool(const Point&)> member(const Polytope& P, double eps = 0.0) {
  return [&P, eps](const Point& x) { return P.contains(x, eps); };
}

}  // namespace

TEST(SteinerEuclidean, TriangleBecomesIsosceles) {
  const auto P = Polytope::from_vertices({E({0, 0}), E({2, 0}), E({1.5, 1})});
  const auto pts = steiner_points(P, 0, 1);
  EXPECT_LT((pts[2].coords() - E({1, 1}).coords()).norm(), 1e-15);
  std::vector<Vec> a, b;
  for (const auto& v : P.vertices()) a.push_back(v.coords());
  for (const auto& v : pts) b.push_back(v.coords());
  EXPECT_NEAR(shoelace(a), 1.0, 1e-15);
  EXPECT_NEAR(shoelace(b), 1.0, 1e-15);
}

TEST(SteinerEuclidean, InradiusGrowsForAsymmetricTriangle) {
  const auto P = Polytope::from_vertices({E({0, 0}), E({2, 0}), E({1.5, 1})});
  EXPECT_GT(inball(steiner_euclidean(P, 0, 1)).radius, inball(P).radius + 1e-3);
}

TEST(SteinerEuclidean, VolumeAndInradiusOnRandomPolytopes) {
  Rng rng = make_rng(51);
  for (int t = 0; t < 30; ++t) {
    const auto P = random_admissible(rng, Geometry::euclidean(3), 5, 1.0);
    const auto S = steiner_euclidean(P, 0, 1);
    EXPECT_NEAR(polytope_volume(S).value, polytope_volume(P).value, 1e-12);
    EXPECT_GE(inball(S).radius, inball(P).radius - 1e-9);
  }
}

TEST(SteinerEuclidean, SymmetricInputIsFixedAndOperatorIsIdempotent) {
  const auto P = Polytope::from_vertices({E({-1, 0, 0}), E({1, 0, 0}), E({0, 1, 0.2}), E({0, -1, 0.3}),
                                          E({0, 0.1, -1})});
  EXPECT_TRUE(same_vertex_set(steiner_euclidean(P, 0, 1), P, 1e-15));
  Rng rng = make_rng(52);
  for (Geometry g : {Geometry::euclidean(3), Geometry::hyperbolic(3), Geometry::spherical(3)}) {
    const auto Q = random_admissible(rng, g, 5, 0.8);
    const auto once = steiner_bound(Q, 0, 1);
    // the edge keeps its indices 0 and 1 because hull_of preserves order
    const auto twice = steiner_bound(once, 0, 1);
    EXPECT_TRUE(same_vertex_set(once, twice, 1e-9)) << geometry_name(g);
  }
}

TEST(SteinerEuclidean, HypothesisFailureRaises) {
  const auto P = Polytope::from_vertices({E({0, 0}), E({1, 0}), E({1, 1}), E({0, 1})});
  try {
    steiner_euclidean(P, 0, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::hypothesis);
  }
}

TEST(SteinerEuclidean, SkeletonContentDoesNotGrowUnderFacePairing) {
  Rng rng = make_rng(53);
  int checked = 0;
  for (int d : {3, 4})
    for (int k : {1, 2}) {
      int found = 0;
      for (int t = 0; t < 4000 && found < 5; ++t) {
        const auto P = random_admissible(rng, Geometry::euclidean(d), d + 2, 1.0);
        if (!face_pairing_holds(P, 0, 1, k)) continue;
        ++found;
        const auto S = steiner_euclidean(P, 0, 1);
        EXPECT_LE(k_content(S, k).value, k_content(P, k).value + 1e-9) << d << " " << k;
      }
      checked += found;
      EXPECT_GT(found, 0) << d << " " << k;
    }
  EXPECT_GT(checked, 4);
}

TEST(SteinerHyperbolic, SymmetricInputIsReproduced) {
  const Geometry g = Geometry::hyperbolic(2);
  const auto P = Polytope::from_vertices({exp_base(g, e_vec(2, 0) * -0.5), exp_base(g, e_vec(2, 0) * 0.5),
                                          exp_base(g, e_vec(2, 1) * 0.7)});
  EXPECT_TRUE(same_vertex_set(steiner_hyperbolic_bound(P, 0, 1), P, 1e-12));
}

TEST(SteinerHyperbolic, AreaAndEdgeLengthBounds) {
  Rng rng = make_rng(54);
  for (int t = 0; t < 50; ++t) {
    const auto P = random_admissible(rng, Geometry::hyperbolic(2), 3, 1.5);
    const auto pts = steiner_points(P, 0, 1);
    const auto S = Polytope::from_vertices(pts);
    EXPECT_GE(polygon_area_exact(S), polygon_area_exact(P) - 1e-12);
    EXPECT_GE(inball(S).radius, inball(P).radius - 1e-9);
    const double before = distance(P.vertex(0), P.vertex(2)) + distance(P.vertex(1), P.vertex(2));
    const double after = distance(pts[0], pts[2]) + distance(pts[1], pts[2]);
    EXPECT_LE(after, before + 1e-12);
  }
}

TEST(SteinerHyperbolic, VolumeBoundInThreeDimensions) {
  Rng rng = make_rng(55);
  MCConfig cfg;
  cfg.samples = 200000;
  for (int t = 0; t < 5; ++t) {
    const auto P = random_admissible(rng, Geometry::hyperbolic(3), 5, 1.0);
    const auto S = steiner_hyperbolic_bound(P, 0, 1);
    const auto a = polytope_volume(P, VolumeMethod::monte_carlo, cfg);
    const auto b = polytope_volume(S, VolumeMethod::monte_carlo, cfg);
    EXPECT_GE(b.value, a.value - 3 * std::hypot(a.std_error, b.std_error));
  }
}

TEST(SteinerSpherical, SymmetricInputIsReproduced) {
  const Geometry g = Geometry::spherical(2);
  const auto P = Polytope::from_vertices({exp_base(g, e_vec(2, 0) * -0.5), exp_base(g, e_vec(2, 0) * 0.5),
                                          exp_base(g, e_vec(2, 1) * 0.7)});
  EXPECT_TRUE(same_vertex_set(steiner_spherical_bound(P, 0, 1), P, 1e-12));
}

TEST(SteinerSpherical, GirardAreaDoesNotDecrease) {
  Rng rng = make_rng(56);
  for (int t = 0; t < 50; ++t) {
    const auto P = random_admissible(rng, Geometry::spherical(2), 3, 1.2);
    const auto S = steiner_spherical_bound(P, 0, 1);
    EXPECT_GE(polygon_area_exact(S), polygon_area_exact(P) - 1e-9);
  }
}

TEST(SteinerSpherical, FibreThroughPoleRaises) {
  const Geometry g = Geometry::spherical(2);
  const Hyperplane h{g, e_vec(3, 1), 0.0};
  try {
    Fiber(h, std::nullopt, Point(g, e_vec(3, 1)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::pole);
  }
}

TEST(Steiner, SymmetralOfTriangleLiesInBoundingTriangle) {
  Rng rng = make_rng(57);
  for (Geometry g : {Geometry::hyperbolic(2), Geometry::spherical(2)}) {
    for (int t = 0; t < 5; ++t) {
      const auto T = random_admissible(rng, g, 3, 1.0);
      const auto B = steiner_bound(T, 0, 1);
      const Hyperplane h = bisector(T.vertex(0), T.vertex(1));
      const std::optional<Line> axis = Line{T.vertex(0), T.vertex(1)};
      const Ball around = circumball(B);
      const Isometry T0 = to_basepoint(around.center).inverse();
      FiberOptions opt;
      opt.span = 4.0;
      opt.max_samples = 1024;
      int inside = 0;
      for (int s = 0; s < 300; ++s) {
        const Point x = T0.apply(random_point(rng, g, 1.2 * around.radius));
        if (!fiber_symmetral_membership(member(T), h, axis, x, opt)) continue;
        ++inside;
        EXPECT_TRUE(B.contains(x, 1e-7)) << geometry_name(g) << " clearance " << facet_clearance(B, x);
      }
      EXPECT_GT(inside, 10);
    }
  }
}

TEST(Shadow, CollinearStartIsTheMinimum) {
  const std::vector<Vec> pts{E({0, 0}).coords(), E({1, 0}).coords(), E({2, 0}).coords()};
  const std::vector<double> lam{1.0, -1.0, 1.0};
  const Vec v = e_vec(2, 1);
  EXPECT_NEAR(shadow_volume(pts, lam, v, 0.0), 0.0, 1e-15);
  EXPECT_GT(shadow_volume(pts, lam, v, 1.0), 0.0);
  EXPECT_GT(shadow_volume(pts, lam, v, -1.0), 0.0);
  for (double a = -2; a <= 2; a += 0.25)
    EXPECT_LE(shadow_volume(pts, lam, v, a), 0.5 * (shadow_volume(pts, lam, v, a - 0.5) +
                                                       shadow_volume(pts, lam, v, a + 0.5)) + 1e-12);
}

TEST(Shadow, MidpointConvexityAndStrictness) {
  Rng rng = make_rng(58);
  for (int t = 0; t < 200; ++t) {
    const int k = 2 + static_cast<int>(rng() % 3);  // 2..4 points in E^3
    std::vector<Vec> pts;
    std::vector<double> lam;
    for (int i = 0; i < k; ++i) {
      pts.push_back(gaussian_vec(rng, 3));
      lam.push_back(uniform(rng, -1, 1));
    }
    const Vec v = gaussian_vec(rng, 3);
    const double a = uniform(rng, -2, 2), b = uniform(rng, -2, 2);
    const double gap = 0.5 * (shadow_volume(pts, lam, v, a) + shadow_volume(pts, lam, v, b)) -
                       shadow_volume(pts, lam, v, 0.5 * (a + b));
    EXPECT_GE(gap, -1e-9);
    // k <= 3 points together with v are affinely independent almost surely
    if (k <= 3 && std::abs(a - b) > 0.1) {
      EXPECT_GT(gap, 0.0);
    }
  }
}

TEST(Fiber, BallCentredOnHyperplaneIsFixed) {
  Rng rng = make_rng(59);
  for (Geometry g : {Geometry::euclidean(2), Geometry::hyperbolic(2), Geometry::spherical(2)}) {
    const Point c = basepoint(g);
    const double r = 0.6;
    const Hyperplane h{g, g.is_euclidean() ? e_vec(2, 0) : e_vec(3, 1), 0.0};
    const Line axis{exp_base(g, e_vec(2, 0) * -0.3), exp_base(g, e_vec(2, 0) * 0.3)};
    auto ball = [&](const Point& x) { return distance(c, x) <= r; };
    for (int s = 0; s < 200; ++s) {
      const Point x = random_point(rng, g, 1.0);
      if (std::abs(distance(c, x) - r) < 1e-6) continue;
      EXPECT_EQ(fiber_symmetral_membership(ball, h, axis, x), ball(x)) << geometry_name(g);
    }
  }
}

TEST(Fiber, AgreesWithEuclideanPolytopeOperator) {
  const auto P = Polytope::from_vertices({E({0, 0}), E({2, 0}), E({1.5, 1})});
  const auto S = steiner_euclidean(P, 0, 1);
  const Hyperplane h = bisector(P.vertex(0), P.vertex(1));
  int disagreements = 0;
  for (int i = 0; i < 32; ++i)
    for (int j = 0; j < 32; ++j) {
      const Point x = E({-0.1 + 2.2 * i / 31.0, -0.1 + 1.2 * j / 31.0});
      const double margin = facet_clearance(S, x);
      if (std::abs(margin) < 1e-6) continue;
      disagreements += fiber_symmetral_membership(member(P), h, std::nullopt, x) != (margin > 0);
    }
  EXPECT_EQ(disagreements, 0);
}

TEST(Fiber, EmptyFibreIsNotMember) {
  const auto P = Polytope::from_vertices({E({0, 0}), E({2, 0}), E({1.5, 1})});
  const Hyperplane h = bisector(P.vertex(0), P.vertex(1));
  EXPECT_FALSE(fiber_symmetral_membership(member(P), h, std::nullopt, E({1, 5})));
  EXPECT_FALSE(fiber_symmetral_membership(member(P), h, std::nullopt, E({-3, 0})));
}

TEST(Fiber, SymmetralPreservesChordLengths) {
  Rng rng = make_rng(60);
  for (Geometry g : {Geometry::euclidean(3), Geometry::hyperbolic(3), Geometry::spherical(3)}) {
    const auto P = random_admissible(rng, g, 5, 1.0);
    const Hyperplane h = bisector(P.vertex(0), P.vertex(1));
    const std::optional<Line> axis = Line{P.vertex(0), P.vertex(1)};
    auto sym = [&](const Point& x) { return fiber_symmetral_membership(member(P), h, axis, x); };
    for (int s = 0; s < 200; ++s) {
      Vec l = Vec::Zero(g.dim + 1);
      for (int j = 0; j < P.size(); ++j) l += uniform01(rng) * lift(P.vertex(j));
      const Fiber f(h, axis, point_from_lift(g, l));
      const auto a = fiber_chord(member(P), f);
      ASSERT_TRUE(a.has_value());
      const auto b = fiber_chord(sym, f);
      ASSERT_TRUE(b.has_value());
      EXPECT_NEAR(b->second - b->first, a->second - a->first, 1e-6) << geometry_name(g);
      EXPECT_NEAR(b->second + b->first, 0.0, 1e-6) << geometry_name(g);
    }
  }
}

TEST(Fiber, SphericalPreimageOfConvexSetIsConvex) {
  Rng rng = make_rng(61);
  const Geometry g = Geometry::spherical(3);
  const Hyperplane h{g, e_vec(4, 3), 0.0};
  for (int t = 0; t < 20; ++t) {
    // K: a spherical triangle in h, given by three unit vectors with x3 = 0
    Mat K(4, 3);
    for (int i = 0; i < 3; ++i) {
      Vec u = Vec::Zero(4);
      u.head(3) = random_unit(rng, 3) * 0.5 + e_vec(3, 0);
      K.col(i) = u.normalized();
    }
    auto in_preimage = [&](const Point& x) {
      const Vec y = project_orthogonal(h, x).coords();
      const Vec c = K.topRows(3).colPivHouseholderQr().solve(y.head(3));
      return c.minCoeff() >= -1e-12;
    };
    std::vector<Point> pre;
    while (pre.size() < 40) {
      Vec c = Vec::Zero(3);
      for (int i = 0; i < 3; ++i) c[i] = uniform01(rng);
      Vec y = K * c;
      y.normalize();
      const double a = uniform(rng, -1.4, 1.4);
      pre.push_back(Point::projected(g, std::cos(a) * y + std::sin(a) * e_vec(4, 3)));
    }
    for (size_t i = 0; i + 1 < pre.size(); ++i) {
      ASSERT_TRUE(in_preimage(pre[i]));
      EXPECT_TRUE(in_preimage(midpoint(pre[i], pre[i + 1])));
    }
  }
}
