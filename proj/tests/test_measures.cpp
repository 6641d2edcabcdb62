#include "isop/measures.hpp"
#include "isop/random.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace isop;
using isop::testing::e_vec;

namespace {

const double pi = std::numbers::pi;

Point E(std::initializer_list<double> xs) {
  Vec v(xs.size());
  int i = 0;
  for (double x : xs) v[i++] = x;
  return Point(Geometry::euclidean(static_cast<int>(xs.size())), v);
}

Polytope random_polytope(Rng& rng, Geometry g, int n, double radius) {
  for (;;) {
    try {
      return Polytope::hull_of(random_points(rng, g, n, radius));
    } catch (const Error&) {
    }
  }
}

Polytope unit_cube(int d) {
  std::vector<Point> v;
  for (int m = 0; m < (1 << d); ++m) {
    Vec x(d);
    for (int j = 0; j < d; ++j) x[j] = (m >> j) & 1;
    v.push_back(Point(Geometry::euclidean(d), x));
  }
  return Polytope::from_vertices(v);
}

double shoelace(const Polytope& P) {
  // order by angle around the centroid
  Vec c = Vec::Zero(2);
  for (const auto& v : P.vertices()) c += v.coords();
  c /= P.size();
  std::vector<std::pair<double, Vec>> pts;
  for (const auto& v : P.vertices())
    pts.push_back({std::atan2(v[1] - c[1], v[0] - c[0]), v.coords()});
  std::sort(pts.begin(), pts.end(), [](auto& a, auto& b) { return a.first < b.first; });
  double a = 0;
  for (size_t i = 0; i < pts.size(); ++i) {
    const Vec& p = pts[i].second;
    const Vec& q = pts[(i + 1) % pts.size()].second;
    a += p[0] * q[1] - p[1] * q[0];
  }
  return 0.5 * std::abs(a);
}

MCConfig mc(std::uint64_t n, std::uint64_t seed = 7) {
  MCConfig c;
  c.samples = n;
  c.seed = seed;
  return c;
}

}  // namespace

TEST(Volume, UnitSquareAndCube) {
  EXPECT_NEAR(polytope_volume(unit_cube(2)).value, 1.0, 1e-14);
  EXPECT_NEAR(polytope_volume(unit_cube(3)).value, 1.0, 1e-14);
  EXPECT_NEAR(polytope_volume(unit_cube(4)).value, 1.0, 1e-13);
}

TEST(Volume, EuclideanPolygonMatchesShoelace) {
  Rng rng = make_rng(31);
  for (int t = 0; t < 50; ++t) {
    const auto P = random_polytope(rng, Geometry::euclidean(2), 9, 1.0);
    EXPECT_NEAR(polytope_volume(P).value, shoelace(P), 1e-12);
  }
}

TEST(Volume, EuclideanHullAgreesWithSampling) {
  Rng rng = make_rng(32);
  for (int d = 3; d <= 4; ++d) {
    const auto P = random_polytope(rng, Geometry::euclidean(d), d + 6, 1.0);
    const double exact = polytope_volume(P).value;
    const Estimate e = polytope_volume(P, VolumeMethod::monte_carlo, mc(400000));
    EXPECT_NEAR(e.value, exact, 4 * e.std_error) << d;
  }
}

TEST(Volume, SphericalOctantIsAnEighthOfTheSphere) {
  const Geometry s2 = Geometry::spherical(2);
  const auto P = Polytope::from_vertices({Point(s2, e_vec(3, 0)), Point(s2, e_vec(3, 1)),
                                          Point(s2, e_vec(3, 2))});
  EXPECT_NEAR(polytope_volume(P).value, pi / 2, 1e-14);
  const Estimate e = polytope_volume(P, VolumeMethod::monte_carlo, mc(400000));
  EXPECT_NEAR(e.value, pi / 2, 4 * e.std_error);
}

TEST(Volume, SphericalThreeOrthantIsASixteenth) {
  const Geometry s3 = Geometry::spherical(3);
  std::vector<Point> v;
  for (int i = 0; i < 4; ++i) v.push_back(Point(s3, e_vec(4, i)));
  const Estimate e = polytope_volume(Polytope::from_vertices(v), VolumeMethod::monte_carlo, mc(1000000));
  EXPECT_NEAR(e.value, sphere_volume(3) / 16, 4 * e.std_error);
  EXPECT_LT(e.std_error, 5e-3 * e.value);
}

TEST(Volume, HyperbolicTrianglesAgreeWithSampling) {
  Rng rng = make_rng(33);
  for (int t = 0; t < 10; ++t) {
    const auto P = random_polytope(rng, Geometry::hyperbolic(2), 3, 2.0);
    const double exact = polytope_volume(P).value;
    const Estimate e = polytope_volume(P, VolumeMethod::monte_carlo, mc(200000, t));
    EXPECT_NEAR(e.value, exact, 4 * e.std_error);
  }
}

TEST(Volume, HyperbolicKleinCubeAgreesWithGridQuadrature) {
  const Geometry h3 = Geometry::hyperbolic(3);
  const double a = 0.45;
  std::vector<Point> v;
  for (int m = 0; m < 8; ++m) {
    Vec y(3);
    for (int j = 0; j < 3; ++j) y[j] = ((m >> j) & 1) ? a : -a;
    v.push_back(unchart(h3, y));
  }
  const auto P = Polytope::from_vertices(v);
  const int n = 120;
  double grid = 0;
  const double h = 2 * a / n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double x = -a + (i + 0.5) * h, y = -a + (j + 0.5) * h, z = -a + (k + 0.5) * h;
        grid += std::pow(1 - x * x - y * y - z * z, -2.0);
      }
  grid *= h * h * h;
  const Estimate e = polytope_volume(P, VolumeMethod::monte_carlo, mc(1000000));
  EXPECT_NEAR(e.value, grid, 4 * e.std_error + 1e-4);
}

TEST(Volume, ExactRequestInHigherCurvedDimensionRaises) {
  Rng rng = make_rng(34);
  const auto P = random_polytope(rng, Geometry::hyperbolic(3), 4, 1.0);
  EXPECT_THROW(polytope_volume(P, VolumeMethod::exact), Error);
}

TEST(MonteCarlo, DeterministicAcrossThreadCounts) {
  Rng rng = make_rng(35);
  const auto P = random_polytope(rng, Geometry::spherical(3), 5, 1.0);
  MCConfig a = mc(100000, 99), b = a;
  b.jobs = 4;
  const Estimate ea = polytope_volume(P, VolumeMethod::monte_carlo, a);
  const Estimate eb = polytope_volume(P, VolumeMethod::monte_carlo, b);
  EXPECT_EQ(ea.value, eb.value);
  EXPECT_EQ(ea.std_error, eb.std_error);
}

TEST(MonteCarlo, ConfigValidationAndBudget) {
  Rng rng = make_rng(36);
  const auto P = random_polytope(rng, Geometry::hyperbolic(2), 4, 1.0);
  EXPECT_THROW(polytope_volume(P, VolumeMethod::monte_carlo, mc(10)), Error);
  MCConfig tight = mc(2000);
  tight.max_std_error = 1e-12;
  try {
    polytope_volume(P, VolumeMethod::monte_carlo, tight);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::budget);
  }
}

TEST(KContent, CubeSkeleta) {
  const auto C = unit_cube(3);
  EXPECT_NEAR(k_content(C, 0).value, 8, 0);
  EXPECT_NEAR(k_content(C, 1).value, 12, 1e-14);
  EXPECT_NEAR(k_content(C, 2).value, 6, 1e-13);
  const auto C4 = unit_cube(4);
  EXPECT_NEAR(k_content(C4, 1).value, 32, 1e-13);
  EXPECT_NEAR(k_content(C4, 3).value, 8, 1e-12);
}

TEST(KContent, FacePolytopePreservesEdgeLengths) {
  Rng rng = make_rng(37);
  for (Geometry g : {Geometry::euclidean(4), Geometry::hyperbolic(3), Geometry::spherical(3)}) {
    const auto P = random_polytope(rng, g, g.dim + 1, 1.0);
    for (const auto& f : faces_k(P, 2)) {
      const auto F = face_polytope(P, f);
      EXPECT_EQ(F.dim(), 2);
      for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b < 3; ++b)
          EXPECT_NEAR(distance(F.vertex(a), F.vertex(b)), distance(P.vertex(f[a]), P.vertex(f[b])),
                      1e-10);
    }
  }
}

TEST(KContent, SphericalTriangleFacesUseGirard) {
  // faces of the S^3 orthant simplex are octants of great 2-spheres
  const Geometry s3 = Geometry::spherical(3);
  std::vector<Point> v;
  for (int i = 0; i < 4; ++i) v.push_back(Point(s3, e_vec(4, i)));
  const auto P = Polytope::from_vertices(v);
  EXPECT_NEAR(k_content(P, 2).value, 4 * pi / 2, 1e-12);
  EXPECT_NEAR(k_content(P, 1).value, 6 * pi / 2, 1e-12);
}

TEST(Density, ConstantGivesVolume) {
  const auto C = unit_cube(3);
  const Estimate e = density_integral(C, DensityFn::constant(), mc(400000));
  EXPECT_NEAR(e.value, 1.0, 4 * e.std_error);
}

TEST(Density, GaussianOverLargeBoxIsOne) {
  std::vector<Point> v;
  for (int m = 0; m < 8; ++m) {
    Vec x(3);
    for (int j = 0; j < 3; ++j) x[j] = ((m >> j) & 1) ? 10.0 : -10.0;
    v.push_back(Point(Geometry::euclidean(3), x));
  }
  const Estimate e = density_integral(Polytope::from_vertices(v), DensityFn::gaussian(3), mc(2000000));
  EXPECT_NEAR(e.value, 1.0, 4 * e.std_error + 1e-6);
}

TEST(Density, AnnulusOverIsoscelesTriangleMatchesClosedForm) {
  const double eps = 0.02;
  const double w = std::sqrt(2 * eps - eps * eps);
  const auto T = Polytope::from_vertices({E({0, 1}), E({-w, 1 - eps}), E({w, 1 - eps})});
  const Estimate e = density_integral(T, DensityFn::annulus(eps), mc(2000000));
  // every point has y >= 1 - eps and the corners are on the unit circle, so
  // the whole triangle sits in the annulus
  EXPECT_NEAR(e.value, eps * w, 4 * e.std_error);
}

TEST(Density, RotationFrameGivesIdenticalEstimates) {
  Rng rng = make_rng(38);
  const auto P = random_polytope(rng, Geometry::euclidean(3), 6, 1.0);
  const Mat R = Eigen::HouseholderQR<Mat>(gaussian_vec(rng, 9).reshaped(3, 3)).householderQ();
  std::vector<Point> rot;
  for (const auto& v : P.vertices()) rot.push_back(Point(Geometry::euclidean(3), R * v.coords()));
  const auto Q = Polytope::from_vertices(rot);
  const DensityFn rho = DensityFn::power(1.5);
  const Estimate a = density_integral(P, rho, mc(100000));
  const Estimate b = density_integral(Q, rho, mc(100000), std::numeric_limits<double>::infinity(), &R);
  EXPECT_NEAR(a.value, b.value, 1e-12 * std::abs(a.value));
}

TEST(Density, TabulatedAndSupport) {
  const DensityFn f = DensityFn::tabulated({{0.0, 2.0}, {1.0, 1.0}, {2.0, 0.0}});
  EXPECT_DOUBLE_EQ(f(0.5), 1.5);
  EXPECT_DOUBLE_EQ(f(3.0), 0.0);
  EXPECT_TRUE(f.non_increasing());
  EXPECT_FALSE(DensityFn::power(2).non_increasing());
  EXPECT_THROW(DensityFn::annulus(0), Error);
  const auto C = unit_cube(2);
  EXPECT_THROW(density_integral(C, DensityFn::constant(), mc(2000), 1.0), Error);
}

TEST(Voronoi, ConstantWeightGivesSphereArea) {
  const Geometry s2 = Geometry::spherical(2);
  std::vector<Point> oct;
  for (int i = 0; i < 3; ++i) {
    oct.push_back(Point(s2, e_vec(3, i)));
    oct.push_back(Point(s2, -e_vec(3, i)));
  }
  EXPECT_NEAR(sphere_voronoi_moment(oct, [](double) { return 1.0; }), 4 * pi, 1e-9);
}

TEST(Voronoi, LinearWeightAgreesWithSampling) {
  const Geometry s2 = Geometry::spherical(2);
  Rng rng = make_rng(39);
  std::vector<Point> pts;
  for (int i = 0; i < 7; ++i) pts.push_back(Point(s2, random_unit(rng, 3)));
  auto rho = [](double t) { return t * t + t; };
  const double q = sphere_voronoi_moment(pts, rho);
  double sum = 0, sum2 = 0;
  const int n = 2000000;
  for (int i = 0; i < n; ++i) {
    const Vec x = random_unit(rng, 3);
    double best = -2;
    for (const auto& p : pts) best = std::max(best, x.dot(p.coords()));
    const double v = rho(std::acos(std::min(1.0, best)));
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / n, se = std::sqrt((sum2 / n - mean * mean) / n);
  EXPECT_NEAR(q, 4 * pi * mean, 4 * 4 * pi * se);
}

TEST(Voronoi, HemisphereConfigurationRaises) {
  const Geometry s2 = Geometry::spherical(2);
  std::vector<Point> pts{Point(s2, e_vec(3, 0)), Point(s2, e_vec(3, 1)), Point(s2, e_vec(3, 2)),
                         Point(s2, -e_vec(3, 0))};
  try {
    sphere_voronoi_moment(pts, [](double t) { return t; });
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::hemisphere);
  }
}

TEST(PolarDual, OctantHasThreeEighthsDeficit) {
  const Geometry s2 = Geometry::spherical(2);
  const auto P = Polytope::from_vertices({Point(s2, e_vec(3, 0)), Point(s2, e_vec(3, 1)),
                                          Point(s2, e_vec(3, 2))});
  EXPECT_NEAR(u1(P).value, 3.0 / 8.0, 1e-14);
}

TEST(PolarDual, TriangleDualAreaIsTwoPiMinusPerimeter) {
  Rng rng = make_rng(40);
  for (int t = 0; t < 20; ++t) {
    const auto P = random_polytope(rng, Geometry::spherical(2), 3, 1.2);
    const auto D = spherical_polar_dual(P);
    EXPECT_NEAR(polytope_volume(D).value, 2 * pi - total_edge_length(P), 1e-10);
    // every dual vertex is polar to a facet of P
    for (const auto& w : D.vertices())
      for (const auto& v : P.vertices()) EXPECT_LE(w.coords().dot(v.coords()), 1e-12);
  }
}

TEST(PolarDual, NonSimplexIsUnsupported) {
  Rng rng = make_rng(41);
  const auto P = random_polytope(rng, Geometry::spherical(2), 6, 1.0);
  if (P.size() > 3) {
    EXPECT_THROW(spherical_polar_dual(P), Error);
  }
}
