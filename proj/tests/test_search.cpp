#include "isop/protocols.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

using namespace isop;

namespace {

Polytope inscribed_start(Rng& rng, const Ball& B, int n) {
  for (;;) {
    try {
      return Polytope::from_vertices(random_on_ball_boundary(rng, B, n));
    } catch (const Error&) {
    }
  }
}

DescentOptions inscribed_volume(const Ball& B) {
  DescentOptions o;
  o.direction = Direction::maximize;
  o.constraint = {ConstraintKind::inscribed, B};
  return o;
}

}  // namespace

TEST(Descent, PlanarQuadrilateralBecomesSquare) {
  const Geometry g = Geometry::euclidean(2);
  const Ball B{basepoint(g), 1.0};
  Rng rng = make_rng(11);
  for (int s = 0; s < 10; ++s) {
    const DescentResult r = symmetrization_descent(inscribed_start(rng, B, 4), inscribed_volume(B));
    EXPECT_NEAR(polytope_volume(r.polytope).value, 2.0, 1e-9);
  }
}

TEST(Descent, SpatialFiveVerticesReachBipyramid) {
  const Geometry g = Geometry::euclidean(3);
  const Ball B{basepoint(g), 1.0};
  Rng rng = make_rng(12);
  for (int s = 0; s < 5; ++s) {
    const DescentResult r = symmetrization_descent(inscribed_start(rng, B, 5), inscribed_volume(B));
    EXPECT_NEAR(polytope_volume(r.polytope).value, std::sqrt(3.0) / 2, 1e-6);
    EXPECT_LT(bisector_asymmetry(r.polytope), 1e-8);
    EXPECT_TRUE(r.fixed_point);
  }
}

TEST(Descent, HistoryIsMonotone) {
  const Geometry g = Geometry::euclidean(3);
  const Ball B{basepoint(g), 1.0};
  Rng rng = make_rng(13);
  const DescentResult r = symmetrization_descent(inscribed_start(rng, B, 5), inscribed_volume(B));
  ASSERT_GE(r.history.size(), 2u);
  for (size_t i = 1; i < r.history.size(); ++i) EXPECT_GE(r.history[i], r.history[i - 1] * (1 - 1e-13));
}

TEST(Descent, SymmetricStartIsFixed) {
  const Polytope J = inscribed_join(Geometry::euclidean(3), 1, 1.0);
  const Ball B{basepoint(Geometry::euclidean(3)), 1.0};
  const DescentResult r = symmetrization_descent(J, inscribed_volume(B));
  EXPECT_TRUE(r.fixed_point);
  EXPECT_NEAR(polytope_volume(r.polytope).value, polytope_volume(J).value, 1e-12);
}

TEST(Descent, WrongDirectionIsRejected) {
  const Geometry g = Geometry::euclidean(3);
  DescentOptions o = inscribed_volume(Ball{basepoint(g), 1.0});
  o.direction = Direction::minimize;
  EXPECT_FALSE(descent_supported(g, o));
  try {
    symmetrization_descent(inscribed_join(g, 1, 1.0), o);
    FAIL() << "expected unsupported";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::unsupported);
  }
}

TEST(Descent, HyperbolicTelKeepsBallInside) {
  const Geometry g = Geometry::hyperbolic(3);
  const Ball B{basepoint(g), 0.2};
  DescentOptions o;
  o.objective.kind = Objective::tel;
  o.direction = Direction::minimize;
  o.constraint = {ConstraintKind::circumscribed, B};
  Rng rng = make_rng(14);
  const Polytope P0 = random_simplex_containing(rng, B, 1.0, 0.3);
  const DescentResult r = symmetrization_descent(P0, o);
  EXPECT_LE(r.history.back(), r.history.front() + 1e-12);
  EXPECT_NEAR(inball(r.polytope).radius, 0.2, 1e-9);
}

TEST(Instances, SimplexFromFacetsContainsBall) {
  for (Space sp : {Space::euclidean, Space::hyperbolic, Space::spherical}) {
    const Geometry g{sp, 3};
    // H^3 simplices have inradius below atanh(1/3)
    const double r = sp == Space::hyperbolic ? 0.3 : 0.4;
    const Ball B{basepoint(g), r};
    Rng rng = make_rng(15);
    for (int t = 0; t < 20; ++t) {
      const Polytope S = random_simplex_containing(rng, B);
      EXPECT_TRUE(contains_ball(S, B, 1e-9)) << geometry_name(g);
      EXPECT_GE(inball(S).radius, r - 1e-9);
    }
  }
}

TEST(Instances, StackedJoinHasDPlusTwoVertices) {
  const Polytope P = stacked_join(5, 1, 2, 1.0, 0.8, 0.6, 0.5);
  EXPECT_EQ(P.size(), 7);
}

TEST(Instances, GeodesicScaleShrinksInradius) {
  const Geometry g = Geometry::hyperbolic(3);
  const Polytope S = regular_simplex(g, RegularBy::inradius, 0.3);
  const Ball b = inball(S);
  EXPECT_LT(inball(scale_geodesic(S, b.center, 0.5)).radius, b.radius);
  EXPECT_NEAR(inball(scale_geodesic(S, b.center, 1.0)).radius, b.radius, 1e-12);
}

TEST(Report, GitBlobHashMatchesGit) {
  // printf 'hello\n' | git hash-object --stdin
  EXPECT_EQ(git_blob_sha1("hello\n"), "ce013625030ba8dba906f756967f9e9ca394464a");
  EXPECT_EQ(git_blob_sha1(""), "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
}

TEST(Report, PolytopeJsonRoundTrip) {
  const Polytope P = regular_simplex(Geometry::spherical(3), RegularBy::inradius, 0.3);
  const Polytope Q = polytope_from_json(polytope_to_json(P));
  ASSERT_EQ(P.size(), Q.size());
  for (int i = 0; i < P.size(); ++i) EXPECT_EQ((P.vertex(i).coords() - Q.vertex(i).coords()).norm(), 0.0);
}

TEST(Report, MalformedPolytopeIsInvalidInput) {
  try {
    polytope_from_json(Json{{"geometry", "E"}, {"d", 2}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::invalid_input);
  }
}

TEST(Report, StrictRelationsNeedMargin) {
  EXPECT_TRUE(relation_holds(Relation::ge, -1e-10, 1e-9));
  EXPECT_FALSE(relation_holds(Relation::lt, 0.0, 1e-9));
  EXPECT_TRUE(relation_holds(Relation::lt, relation_margin(Relation::lt, 1.0, 2.0), 1e-9));
  EXPECT_FALSE(relation_holds(Relation::eq, relation_margin(Relation::eq, 1.0, 1.1), 1e-9));
}

TEST(Experiment, ParsesToml) {
  const Experiment e = parse_experiment("id = \"ratio\"\ngeometry = \"H\"\nd = 3\ntrials = 7\nradius = 0.8\n");
  EXPECT_EQ(e.id, "ratio");
  EXPECT_EQ(e.geometry.space, Space::hyperbolic);
  EXPECT_EQ(e.geometry.dim, 3);
  EXPECT_EQ(e.trials, 7);
  EXPECT_DOUBLE_EQ(e.num("radius", 0), 0.8);
}

TEST(Experiment, RejectsBadInput) {
  for (const char* text : {"id = \"x\"\ngeometry = \"Q\"\n", "id = \"x\"\nd = -1\n", "geometry = \"E\"\n",
                           "id = \"x\"\ntrials = \"many\"\n", "id = [\n"}) {
    try {
      parse_experiment(text);
      FAIL() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::invalid_input) << text;
    }
  }
}

TEST(Experiment, ObjectiveMismatchIsInvalidInput) {
  Experiment e = parse_experiment("id = \"ratio\"\ngeometry = \"H\"\nd = 2\nobjective = \"TEL\"\n");
  try {
    verify(e);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), Errc::invalid_input);
  }
}

TEST(Verify, SameConfigGivesSameReport) {
  const std::string text = "id = \"gaussian\"\ngeometry = \"E\"\nd = 3\ntrials = 4\nsamples = 20000\nseed = 5\n";
  Experiment a = parse_experiment(text), b = parse_experiment(text);
  b.jobs = 3;
  EXPECT_EQ(verify(a).to_json().dump(), verify(b).to_json().dump());
}

TEST(Verify, EveryProtocolRunsSmall) {
  // smallest sensible configuration of each protocol; only checks that it runs
  const std::map<std::string, std::string> geo = {
      {"ratio", "geometry = \"S\"\nd = 2"},          {"inscribedvol", "geometry = \"H\"\nd = 2"},
      {"circumscribed_dp1", "geometry = \"H\"\nd = 2"}, {"circumscribed_sph", "geometry = \"S\"\nd = 3"},
      {"problem_smw", "geometry = \"S\"\nd = 4"},      {"moment", "geometry = \"S\"\nd = 2"},
      {"TEL_spherical_i", "geometry = \"S\"\nd = 3"},  {"TEL_spherical_ii", "geometry = \"S\"\nd = 3"},
      {"edgelength_HH", "geometry = \"H\"\nd = 3"},    {"steiner_bound", "geometry = \"S\"\nd = 2"},
      {"annulus", "geometry = \"E\"\nd = 2"},          {"g4_tie", "geometry = \"E\"\nd = 4"}};
  for (const auto& p : protocols()) {
    const auto it = geo.find(p.id);
    const std::string text = "id = \"" + p.id + "\"\n" + (it == geo.end() ? "geometry = \"E\"\nd = 3" : it->second) +
                             "\ntrials = 2\nsamples = 2000\n";
    Report r;
    ASSERT_NO_THROW(r = verify(parse_experiment(text))) << p.id;
    EXPECT_GE(r.evaluated, 1) << p.id;
    EXPECT_EQ(r.config_hash.size(), 40u);
  }
}

TEST(Verify, DumpReproducesOnReverify) {
  Experiment e = parse_experiment("id = \"euvol\"\ngeometry = \"E\"\nd = 4\ntrials = 10\nseed = 3\n");
  Report r = verify(e);
  ASSERT_FALSE(r.pass());
  const auto dir = std::filesystem::temp_directory_path() / "isop_test_dump";
  const std::string path = dump_counterexample(e, r, dir.string());
  const std::string text = read_file(path);
  const Report again = reverify(Json::parse(text), text);
  EXPECT_TRUE(again.details["reproduced"].get<bool>());
  EXPECT_DOUBLE_EQ(again.best, r.best);
  EXPECT_FALSE(again.pass());
  std::filesystem::remove_all(dir);
}

TEST(Verify, ClosedFormProtocolsPass) {
  for (const char* text : {"id = \"g4_tie\"\ngeometry = \"E\"\nd = 4\ntol = 1e-12\n",
                           "id = \"closed_forms\"\ngeometry = \"E\"\nd = 3\ntol = 1e-12\n",
                           "id = \"inball_identity\"\ngeometry = \"E\"\nd = 3\ntol = 1e-8\n"}) {
    const Report r = verify(parse_experiment(text));
    EXPECT_TRUE(r.pass()) << r.id << " " << r.best;
  }
}
