#include <gtest/gtest.h>

#include <numbers>

#include "oracles.hpp"
#include "stokerlab/fixtures.hpp"
#include "stokerlab/polyhedron.hpp"

using namespace stokerlab;

namespace {

// Frozen from oracle::intrinsic_dihedral on the shipped seeds at scale 0.5.
constexpr double kTetrahedronAngleAtHalf = 1.190249135105077;
constexpr double kCubeAngleAtHalf = 1.4797615487574816;

Vec3 third_vertex(const EmbeddedPolyhedron& p, int f, const Edge& e) {
  for (int v : p.comb().face(f))
    if (v != e.a && v != e.b) return p.positions[v];
  return Vec3::Zero();
}

double oracle_angle(const EmbeddedPolyhedron& p, int e) {
  const Edge& edge = p.comb().edge(e);
  return oracle::intrinsic_dihedral(p.positions[edge.a], p.positions[edge.b], third_vertex(p, edge.left_face, edge),
                                    third_vertex(p, edge.right_face, edge));
}

ErrorKind first_issue(const EmbeddedPolyhedron& p) {
  const EmbeddingReport r = validate_embedding(p);
  EXPECT_FALSE(r.ok);
  return r.issues.empty() ? ErrorKind::IoError : r.issues.front().kind;
}

}  // namespace

TEST(Combinatorics, TetrahedronCounts) {
  const CombinatorialReport r = validate_combinatorics(4, fixtures::tetrahedron().combinatorics.faces());
  EXPECT_TRUE(r.ok);
  EXPECT_EQ(r.vertex_count, 4);
  EXPECT_EQ(r.edge_count, 6);
  EXPECT_EQ(r.face_count, 4);
}

TEST(Combinatorics, CubeCounts) {
  const CombinatorialType& c = fixtures::cube().combinatorics;
  EXPECT_EQ(c.vertex_count(), 8);
  EXPECT_EQ(c.edge_count(), 12);
  EXPECT_EQ(c.face_count(), 6);
  EXPECT_EQ(c.vertex_count() + c.face_count() - c.edge_count(), 2);
}

TEST(Combinatorics, AllFixturesAreConsistent) {
  for (const auto& f : fixtures::all()) {
    const CombinatorialType& c = f.combinatorics;
    for (int e = 0; e < c.edge_count(); ++e) {
      const Edge& edge = c.edge(e);
      EXPECT_LT(edge.a, edge.b);
      EXPECT_EQ(c.face_of_directed(edge.a, edge.b), edge.left_face);
      EXPECT_EQ(c.face_of_directed(edge.b, edge.a), edge.right_face);
      EXPECT_EQ(c.edge_index(edge.b, edge.a), e);
    }
    for (int v = 0; v < c.vertex_count(); ++v) {
      const VertexStar& s = c.star(v);
      const int d = c.valence(v);
      ASSERT_EQ(static_cast<int>(s.faces.size()), d);
      for (int k = 0; k < d; ++k) {
        const Edge& edge = c.edge(s.edges[k]);
        const std::array<int, 2> adjacent = {edge.left_face, edge.right_face};
        EXPECT_NE(std::find(adjacent.begin(), adjacent.end(), s.faces[k]), adjacent.end());
        EXPECT_NE(std::find(adjacent.begin(), adjacent.end(), s.faces[(k + 1) % d]), adjacent.end());
      }
    }
  }
}

TEST(Combinatorics, InconsistentIncidenceIsReported) {
  // Second face traverses edge 0->1 in the same direction as the first.
  const CombinatorialReport r =
      validate_combinatorics(4, {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 3, 2}});
  EXPECT_FALSE(r.ok);
  EXPECT_FALSE(r.violations.empty());
}

TEST(Combinatorics, EulerViolationIsReported) {
  const CombinatorialReport r = validate_combinatorics(4, {{0, 1, 2}, {0, 3, 1}, {0, 2, 3}});
  EXPECT_FALSE(r.ok);
  EXPECT_THROW(CombinatorialType::from_faces(4, {{0, 1, 2}, {0, 3, 1}, {0, 2, 3}}), Error);
}

TEST(Planarity, TetrahedronHasNoConstraints) {
  EXPECT_EQ(planarity_residuals(fixtures::tetrahedron().at_scale(0.5)).size(), 0);
}

TEST(Planarity, CubeIsExactlyPlanar) {
  const Eigen::VectorXd r = planarity_residuals(fixtures::cube().at_scale(0.5));
  EXPECT_EQ(r.size(), 6);
  EXPECT_LT(r.cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Planarity, DisplacementScalesWithAnchorArea) {
  const EmbeddedPolyhedron cube = fixtures::cube().at_scale(0.5);
  const Face& face = cube.comb().face(0);
  const Vec3 a = cube.positions[face[1]] - cube.positions[face[0]];
  const Vec3 b = cube.positions[face[2]] - cube.positions[face[0]];
  const Vec3 normal = a.cross(b).normalized();
  const double delta = 1e-3;
  EmbeddedPolyhedron moved = cube;
  moved.positions[face[3]] += delta * normal;
  EXPECT_NEAR(planarity_residuals(moved)(0), delta * a.cross(b).norm(), 1e-10);
}

TEST(Convexity, SignConventions) {
  const EmbeddedPolyhedron tet = fixtures::tetrahedron().at_scale(0.3);
  EXPECT_GT(convexity_margins(tet).minCoeff(), 0.0);
  std::vector<Vec3> mirrored = tet.positions;
  for (Vec3& x : mirrored) x = -x;
  EXPECT_LT(convexity_margins(EmbeddedPolyhedron(tet.combinatorics, mirrored)).maxCoeff(), 0.0);
}

TEST(Convexity, CrossingOneFacePlane) {
  // A point just beyond the plane of one face is on the wrong side of exactly
  // that face; pulled back inside it is interior to all faces.
  const EmbeddedPolyhedron cube = fixtures::cube().at_scale(0.5);
  for (int f = 0; f < cube.comb().face_count(); ++f) {
    Vec3 centroid = Vec3::Zero();
    for (int v : cube.comb().face(f)) centroid += cube.positions[v];
    centroid /= static_cast<double>(cube.comb().face(f).size());
    for (double t : {1.01, 0.99}) {
      const Vec3 x = t * centroid;
      for (int g = 0; g < cube.comb().face_count(); ++g) {
        const bool outside = face_determinant(cube, g, x) > 0.0;
        EXPECT_EQ(outside, g == f && t > 1.0) << f << " " << g << " " << t;
      }
    }
  }
}

TEST(Embedding, ValidAndInvalidInputs) {
  EXPECT_TRUE(validate_embedding(fixtures::tetrahedron().at_scale(0.2)).ok);
  const fixtures::Fixture cube = fixtures::cube();
  std::vector<Vec3> unit(cube.seed.size());
  for (std::size_t i = 0; i < unit.size(); ++i) unit[i] = cube.seed[i] * std::sqrt(3.0) / 2.0;  // side 1
  EXPECT_TRUE(validate_embedding(EmbeddedPolyhedron(cube.combinatorics, unit)).ok);
  std::vector<Vec3> small = unit, big = unit;
  for (Vec3& x : small) x *= 0.4;
  for (Vec3& x : big) x *= 2.0;
  EXPECT_TRUE(validate_embedding(EmbeddedPolyhedron(cube.combinatorics, small)).ok);
  EXPECT_EQ(first_issue(EmbeddedPolyhedron(cube.combinatorics, big)), ErrorKind::BallBoundary);
  try {
    embed_euclidean(cube.combinatorics, unit, 2.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::BallBoundary);
  }
}

TEST(Embedding, NonPlanarQuad) {
  EmbeddedPolyhedron cube = fixtures::cube().at_scale(0.5);
  cube.positions[7] *= 1.05;
  EXPECT_EQ(first_issue(cube), ErrorKind::PlanarityViolation);
}

TEST(InteriorPoint, SymmetricFixturesAndTranslation) {
  EXPECT_LT(interior_point(fixtures::tetrahedron().at_scale(0.5)).p.norm(), 1e-15);
  EXPECT_LT(interior_point(fixtures::cube().at_scale(0.5)).p.norm(), 1e-15);
  EmbeddedPolyhedron shifted = fixtures::tetrahedron().at_scale(0.3);
  for (Vec3& x : shifted.positions) x += Vec3(0.2, -0.1, 0.3);
  const KleinPoint c = interior_point(shifted);
  for (int f = 0; f < 4; ++f) EXPECT_LT(face_determinant(shifted, f, c.p), 0.0);
}

TEST(DihedralAngles, OrthogonalCorner) {
  const EmbeddedPolyhedron corner(CombinatorialType::from_faces(4, {{0, 3, 2}, {0, 1, 3}, {0, 2, 1}, {1, 2, 3}}),
                                  {{0, 0, 0}, {0.5, 0, 0}, {0, 0.5, 0}, {0, 0, 0.5}});
  const AngleVector a = dihedral_angles(corner);
  for (int e = 0; e < 3; ++e) EXPECT_NEAR(a(e), std::numbers::pi / 2, 1e-14);  // edges 0-1, 0-2, 0-3
}

TEST(DihedralAngles, RegularTetrahedron) {
  const EmbeddedPolyhedron tet = fixtures::tetrahedron().at_scale(0.5);
  const AngleVector a = dihedral_angles(tet);
  for (int e = 0; e < 6; ++e) {
    EXPECT_NEAR(a(e), kTetrahedronAngleAtHalf, 1e-12);
    EXPECT_NEAR(a(e), oracle_angle(tet, e), 1e-12);
  }
  // Hyperbolic angles sit below the Euclidean value and approach it as the
  // polyhedron shrinks.
  const double euclidean = std::acos(1.0 / 3.0);
  double previous = 0.0;
  for (double s : {0.5, 0.3, 0.1, 0.01}) {
    const double angle = dihedral_angles(fixtures::tetrahedron().at_scale(s))(0);
    EXPECT_LT(angle, euclidean);
    EXPECT_GT(angle, previous);
    previous = angle;
  }
  EXPECT_NEAR(dihedral_angles(fixtures::tetrahedron().at_scale(1e-3))(0), euclidean, 1e-6);
}

TEST(DihedralAngles, CubeSymmetry) {
  for (double s : {0.1, 0.5, 0.8}) {
    const AngleVector a = dihedral_angles(fixtures::cube().at_scale(s));
    EXPECT_LT(a.maxCoeff() - a.minCoeff(), 1e-12);
  }
  const EmbeddedPolyhedron cube = fixtures::cube().at_scale(0.5);
  EXPECT_NEAR(dihedral_angles(cube)(0), kCubeAngleAtHalf, 1e-12);
}

TEST(DihedralAngles, MatchIntrinsicOracleOnAllFixtures) {
  for (const auto& f : fixtures::all())
    for (double s : {0.2, 0.6, 0.9}) {
      const EmbeddedPolyhedron p = f.at_scale(s);
      const AngleVector a = dihedral_angles(p);
      for (int e = 0; e < p.comb().edge_count(); ++e) {
        EXPECT_NEAR(a(e), oracle_angle(p, e), 1e-10) << f.name << " " << s << " edge " << e;
        EXPECT_GT(a(e), 0.0);
        EXPECT_LT(a(e), std::numbers::pi);
      }
    }
}

TEST(DihedralAngles, InvariantUnderIsometries) {
  const EmbeddedPolyhedron prism = fixtures::triangular_prism().at_scale(0.5);
  const Isometry g = so31_basis()[3].exp(0.3) * so31_basis()[1].exp(0.7) * so31_basis()[5].exp(-0.2);
  EXPECT_LT((dihedral_angles(prism.transformed(g)) - dihedral_angles(prism)).cwiseAbs().maxCoeff(), 1e-12);
}
