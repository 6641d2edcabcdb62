#include "isop/geometry.hpp"
#include "isop/random.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace isop;
using isop::testing::e_vec;

namespace {

const double pi = std::numbers::pi;

std::vector<Geometry> all_geometries(int d) {
  return {Geometry::euclidean(d), Geometry::hyperbolic(d), Geometry::spherical(d)};
}

}  // namespace

TEST(Point, RejectsOffModelCoordinates) {
  EXPECT_THROW(Point(Geometry::spherical(2), Vec::Constant(3, 1.0)), Error);
  Vec h(3);
  h << 2.0, 0.0, 0.0;
  EXPECT_THROW(Point(Geometry::hyperbolic(2), h), Error);
  EXPECT_THROW(Point(Geometry::euclidean(2), Vec::Zero(3)), Error);
}

TEST(Distance, KnownValues) {
  const Geometry s2 = Geometry::spherical(2);
  EXPECT_NEAR(distance(Point(s2, e_vec(3, 0)), Point(s2, e_vec(3, 1))), pi / 2, 1e-15);

  const Geometry h2 = Geometry::hyperbolic(2);
  Vec q(3);
  q << std::cosh(1.0), std::sinh(1.0), 0.0;
  EXPECT_NEAR(distance(basepoint(h2), Point(h2, q)), 1.0, 1e-15);
}

TEST(Distance, AntipodalPointsRaise) {
  const Geometry s2 = Geometry::spherical(2);
  try {
    distance(Point(s2, e_vec(3, 2)), Point(s2, -e_vec(3, 2)));
    FAIL() << "expected an antipodal error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::antipodal);
  }
}

TEST(Distance, GeometryMismatchRaises) {
  EXPECT_THROW(distance(basepoint(Geometry::spherical(2)), basepoint(Geometry::hyperbolic(2))),
               Error);
}

TEST(Distance, AgreesWithArcFormulasAndIsAMetric) {
  Rng rng = make_rng(11);
  for (const Geometry& g : all_geometries(3)) {
    for (int t = 0; t < 200; ++t) {
      const Point a = random_point(rng, g, 1.2);
      const Point b = random_point(rng, g, 1.2);
      const Point c = random_point(rng, g, 1.2);
      EXPECT_NEAR(distance(a, b), isop::testing::naive_distance(a, b), 1e-7);
      EXPECT_NEAR(distance(a, b), distance(b, a), 1e-15);
      EXPECT_LE(distance(a, c), distance(a, b) + distance(b, c) + 1e-12);
    }
  }
}

TEST(Midpoint, IsEquidistantAndHalfway) {
  Rng rng = make_rng(12);
  for (const Geometry& g : all_geometries(3)) {
    for (int t = 0; t < 100; ++t) {
      const Point a = random_point(rng, g, 1.4);
      const Point b = random_point(rng, g, 1.4);
      const Point m = midpoint(a, b);
      EXPECT_NEAR(distance(a, m), 0.5 * distance(a, b), 1e-12);
      EXPECT_NEAR(distance(b, m), 0.5 * distance(a, b), 1e-12);
    }
  }
}

TEST(Bisector, ReflectionSwapsEndpointsAndIsAnIsometry) {
  Rng rng = make_rng(13);
  for (const Geometry& g : all_geometries(3)) {
    for (int t = 0; t < 100; ++t) {
      const Point p = random_point(rng, g, 1.3);
      const Point q = random_point(rng, g, 1.3);
      const Hyperplane h = bisector(p, q);
      EXPECT_LT(h.signed_distance(p), 0);
      EXPECT_GT(h.signed_distance(q), 0);
      EXPECT_NEAR(h.signed_distance(p), -h.signed_distance(q), 1e-12);
      EXPECT_LT((reflect(h, p).coords() - q.coords()).norm(), 1e-10);
      const Point x = random_point(rng, g, 1.3);
      const Point y = random_point(rng, g, 1.3);
      EXPECT_NEAR(distance(reflect(h, x), reflect(h, y)), distance(x, y), 1e-10);
      EXPECT_LT((reflect(h, reflect(h, x)).coords() - x.coords()).norm(), 1e-10);
      EXPECT_NEAR(std::abs(h.signed_distance(x)), 0.5 * distance(x, reflect(h, x)), 1e-10);
    }
  }
}

TEST(Bisector, HyperbolicMidpointOfSymmetricPair) {
  // H^2, p = (cosh 1, sinh 1, 0), q = (cosh 1, -sinh 1, 0): normal along x1
  // through the basepoint.
  const Geometry h2 = Geometry::hyperbolic(2);
  Vec p(3), q(3);
  p << std::cosh(1.0), std::sinh(1.0), 0.0;
  q << std::cosh(1.0), -std::sinh(1.0), 0.0;
  const Hyperplane h = bisector(Point(h2, p), Point(h2, q));
  EXPECT_NEAR(std::abs(h.normal[1]), 1.0, 1e-14);
  EXPECT_NEAR(h.signed_distance(basepoint(h2)), 0.0, 1e-15);
}

TEST(Projection, OrthogonalFootIsOnHyperplaneAndClosest) {
  Rng rng = make_rng(14);
  for (const Geometry& g : all_geometries(3)) {
    for (int t = 0; t < 50; ++t) {
      const Hyperplane h = bisector(random_point(rng, g, 1.0), random_point(rng, g, 1.0));
      const Point x = random_point(rng, g, 1.0);
      const Point f = project_orthogonal(h, x);
      EXPECT_NEAR(h.signed_distance(f), 0.0, 1e-12);
      EXPECT_NEAR(distance(x, f), std::abs(h.signed_distance(x)), 1e-10);
    }
  }
}

TEST(Projection, SphericalPoleRaises) {
  const Geometry s2 = Geometry::spherical(2);
  const Hyperplane h{s2, e_vec(3, 2), 0.0};
  try {
    project_orthogonal(h, Point(s2, e_vec(3, 2)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::pole);
  }
}

TEST(GOrthogonal, FixesHyperplaneSendsAxisToFootAndKeepsAxisDistance) {
  Rng rng = make_rng(15);
  const Geometry g = Geometry::hyperbolic(3);
  for (int t = 0; t < 40; ++t) {
    const Point p1 = random_point(rng, g, 1.5);
    const Point p2 = random_point(rng, g, 1.5);
    const Hyperplane h = bisector(p1, p2);
    const Line axis{p1, p2};
    const Point m = midpoint(p1, p2);

    EXPECT_LT((project_g_orthogonal(h, axis, p1).coords() - m.coords()).norm(), 1e-9);
    EXPECT_LT((project_g_orthogonal(h, axis, p2).coords() - m.coords()).norm(), 1e-9);

    const Point on_h = project_orthogonal(h, random_point(rng, g, 1.5));
    EXPECT_LT((project_g_orthogonal(h, axis, on_h).coords() - on_h.coords()).norm(), 1e-9);

    const Point x = random_point(rng, g, 1.5);
    const Point px = project_g_orthogonal(h, axis, x);
    EXPECT_NEAR(h.signed_distance(px), 0.0, 1e-10);
    const double span = 6.0;
    EXPECT_NEAR(isop::testing::distance_to_geodesic(x, p1, p2, span),
                isop::testing::distance_to_geodesic(px, p1, p2, span), 1e-7);
    // reflecting across h flips the hypercycle parameter
    EXPECT_NEAR(hypercycle_parameter(h, axis, reflect(h, x)), -hypercycle_parameter(h, axis, x),
                1e-10);
  }
}

TEST(GOrthogonal, RejectsNonPerpendicularAxis) {
  const Geometry g = Geometry::hyperbolic(2);
  Rng rng = make_rng(16);
  const Hyperplane h = bisector(random_point(rng, g, 1.0), random_point(rng, g, 1.0));
  const Line axis{random_point(rng, g, 1.0), random_point(rng, g, 1.0)};
  EXPECT_THROW(project_g_orthogonal(h, axis, basepoint(g)), Error);
  EXPECT_THROW(project_g_orthogonal(Hyperplane{Geometry::euclidean(2), e_vec(2, 0), 0.0},
                                    Line{basepoint(Geometry::euclidean(2)),
                                         basepoint(Geometry::euclidean(2))},
                                    basepoint(Geometry::euclidean(2))),
               Error);
}

TEST(Chart, RoundTripAndCentring) {
  Rng rng = make_rng(17);
  for (const Geometry& g : all_geometries(3)) {
    const Point c = random_point(rng, g, 0.8);
    const Chart ch(c);
    EXPECT_LT(ch.to_chart(c).norm(), 1e-12);
    for (int t = 0; t < 50; ++t) {
      const Point x = random_point(rng, g, 1.2);
      const Point back = ch.from_chart(ch.to_chart(x));
      EXPECT_LT((back.coords() - x.coords()).norm(), 1e-11);
      // chart_lift is a positive multiple of the ambient lift
      const Vec l = ch.chart_lift(ch.to_chart(x));
      const Vec a = lift(x);
      EXPECT_LT((l / l.norm() - a / a.norm()).norm(), 1e-11);
    }
  }
}

TEST(Chart, GnomonicOfEquatorRaises) {
  const Geometry s2 = Geometry::spherical(2);
  EXPECT_THROW(chart(Point(s2, e_vec(3, 1))), Error);
}

TEST(Chart, DensityIntegratesToBallVolumes) {
  // radial quadrature of the chart density over the image of a geodesic
  // disk of radius R about the basepoint
  const double R = 0.9;
  auto radial = [](const Chart& ch, double rho_max) {
    const int n = 20000;
    double sum = 0;
    for (int i = 0; i < n; ++i) {
      const double rho = (i + 0.5) * rho_max / n;
      Vec y = Vec::Zero(2);
      y[0] = rho;
      sum += ch.density(y) * 2 * pi * rho;
    }
    return sum * rho_max / n;
  };
  EXPECT_NEAR(radial(Chart(Geometry::hyperbolic(2)), std::tanh(R)), 2 * pi * (std::cosh(R) - 1),
              1e-6);
  EXPECT_NEAR(radial(Chart(Geometry::spherical(2)), std::tan(R)), 2 * pi * (1 - std::cos(R)),
              1e-6);
}

TEST(Isometry, TranslationMovesBasepointAndPreservesDistance) {
  Rng rng = make_rng(18);
  for (const Geometry& g : all_geometries(3)) {
    for (int t = 0; t < 30; ++t) {
      const Vec v = gaussian_vec(rng, 3) * 0.5;
      const Isometry T = translation(g, v);
      EXPECT_LT((T.apply(basepoint(g)).coords() - exp_base(g, v).coords()).norm(), 1e-12);
      const Point a = random_point(rng, g, 1.0);
      const Point b = random_point(rng, g, 1.0);
      EXPECT_NEAR(distance(T.apply(a), T.apply(b)), distance(a, b), 1e-11);
      EXPECT_LT((T.inverse().apply(T.apply(a)).coords() - a.coords()).norm(), 1e-11);
      EXPECT_LT((log_base(exp_base(g, v)) - v).norm(), 1e-12);
    }
  }
}

TEST(Lift, FunctionalRoundTrip) {
  Rng rng = make_rng(19);
  for (const Geometry& g : all_geometries(3)) {
    const Hyperplane h = bisector(random_point(rng, g, 1.0), random_point(rng, g, 1.0));
    const Hyperplane back = hyperplane_from_functional(g, h.functional());
    const Point x = random_point(rng, g, 1.0);
    EXPECT_NEAR(h.signed_distance(x), back.signed_distance(x), 1e-12);
    EXPECT_LT((point_from_lift(g, 3.0 * lift(x)).coords() - x.coords()).norm(), 1e-12);
  }
}
