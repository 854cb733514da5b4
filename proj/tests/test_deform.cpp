#include <gtest/gtest.h>

#include <random>

#include "stokerlab/deform.hpp"
#include "stokerlab/fixtures.hpp"

using namespace stokerlab;

namespace {

double max_abs(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

double vertex_gap(const EmbeddedPolyhedron& a, const EmbeddedPolyhedron& b) {
  double d = 0.0;
  for (int v = 0; v < a.vertex_count(); ++v) d = std::max(d, (a.positions[v] - b.positions[v]).cwiseAbs().maxCoeff());
  return d;
}

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::IoError;
}

Isometry some_isometry() {
  const auto b = so31_basis();
  return b[0].exp(0.4) * b[4].exp(-0.3) * b[2].exp(1.1) * b[3].exp(0.2);
}

}  // namespace

TEST(GaugeFix, Normalization) {
  const EmbeddedPolyhedron g = gauge_fix(fixtures::triangular_prism().at_scale(0.5));
  EXPECT_LT(g.positions[0].norm(), 1e-14);
  EXPECT_GT(g.positions[1](0), 0.0);
  EXPECT_LT(std::abs(g.positions[1](1)) + std::abs(g.positions[1](2)), 1e-14);
  EXPECT_GT(g.positions[2](1), 0.0);
  EXPECT_LT(std::abs(g.positions[2](2)), 1e-14);
}

TEST(GaugeFix, IdempotentAndOrbitInvariant) {
  for (const auto& f : fixtures::all()) {
    const EmbeddedPolyhedron p = f.at_scale(0.5);
    const EmbeddedPolyhedron g = gauge_fix(p);
    EXPECT_LT(vertex_gap(gauge_fix(g), g), 1e-13) << f.name;
    EXPECT_LT(vertex_gap(gauge_fix(p.transformed(some_isometry())), g), 1e-9) << f.name;
    EXPECT_LT(max_abs(dihedral_angles(g) - dihedral_angles(p)), 1e-10);
  }
}

TEST(GaugeFix, CollinearFrame) {
  EmbeddedPolyhedron p = fixtures::tetrahedron().at_scale(0.5);
  p.positions[2] = 0.5 * (p.positions[0] + p.positions[1]);
  EXPECT_EQ(kind_of([&] { gauge_fix(p); }), ErrorKind::DegenerateFrame);
}

TEST(RealizeAngles, CurrentAnglesAreAFixedPoint) {
  const EmbeddedPolyhedron p = fixtures::cube().at_scale(0.5);
  const DeformResult r = realize_angles(p, dihedral_angles(p));
  EXPECT_EQ(r.iterations_used, 0);
  EXPECT_EQ(r.residual_history.size(), 1u);
  EXPECT_LT(vertex_gap(r.final, gauge_fix(p)), 1e-13);
}

TEST(RealizeAngles, TetrahedronSmallPerturbation) {
  const EmbeddedPolyhedron p = fixtures::tetrahedron().at_scale(0.5);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> delta(-1e-3, 1e-3);
  for (int run = 0; run < 10; ++run) {
    AngleVector target = dihedral_angles(p);
    for (Eigen::Index e = 0; e < target.size(); ++e) target(e) += delta(rng);
    const DeformResult r = realize_angles(p, target);
    EXPECT_LT(max_abs(dihedral_angles(r.final) - target), 1e-10);
    EXPECT_LE(r.iterations_used, 20);
    EXPECT_GT(convexity_margins(r.final).minCoeff(), 0.0);
  }
}

TEST(RealizeAngles, CubeSingleAngleWithContinuation) {
  const EmbeddedPolyhedron p = fixtures::cube().at_scale(0.5);
  AngleVector target = dihedral_angles(p);
  target(0) += 0.05;
  DeformOptions opts;
  opts.continuation_steps = 10;
  const DeformResult r = realize_angles(p, target, opts);
  EXPECT_LT(max_abs(r.achieved_angles - target), 1e-10);
  EXPECT_LT(max_abs(planarity_residuals(r.final)), 1e-11);
  EXPECT_TRUE(validate_embedding(r.final).ok);
}

TEST(RealizeAngles, ResidualConvergesQuadratically) {
  const EmbeddedPolyhedron p = fixtures::triangular_prism().at_scale(0.5);
  AngleVector target = dihedral_angles(p);
  for (Eigen::Index e = 0; e < target.size(); ++e) target(e) += (e % 2 ? 1.0 : -1.0) * 5e-3;
  const DeformResult r = realize_angles(p, target);
  const auto& h = r.residual_history;
  ASSERT_GE(h.size(), 3u);
  // Newton-type contraction while above the rounding floor.
  for (std::size_t k = 1; k < h.size(); ++k)
    if (h[k - 1] > 1e-7 && h[k] > 1e-13) EXPECT_LT(h[k], 10.0 * h[k - 1] * h[k - 1] + 1e-13) << k;
}

TEST(RealizeAngles, InputRejection) {
  const EmbeddedPolyhedron p = fixtures::cube().at_scale(0.5);
  AngleVector bad = dihedral_angles(p);
  bad(3) = 3.2;
  EXPECT_EQ(kind_of([&] { realize_angles(p, bad); }), ErrorKind::InvalidTarget);
  EXPECT_EQ(kind_of([&] { realize_angles(p, AngleVector::Constant(5, 1.0)); }), ErrorKind::InvalidTarget);
  DeformOptions opts;
  opts.step_damping = 0.0;
  EXPECT_EQ(kind_of([&] { realize_angles(p, dihedral_angles(p), opts); }), ErrorKind::InvalidTarget);
}

TEST(RealizeAngles, IterationBudgetExhausted) {
  const EmbeddedPolyhedron p = fixtures::tetrahedron().at_scale(0.5);
  AngleVector target = dihedral_angles(p);
  target(0) += 1e-3;
  DeformOptions opts;
  opts.max_iterations = 1;
  EXPECT_EQ(kind_of([&] { realize_angles(p, target, opts); }), ErrorKind::NoConvergence);
}

TEST(RealizeAngles, GrowingPastTheBall) {
  const EmbeddedPolyhedron p = fixtures::cube().at_scale(0.5);
  AngleVector target = dihedral_angles(p);
  target(0) = 2.5;
  EXPECT_EQ(kind_of([&] { realize_angles(p, target); }), ErrorKind::BallExit);
}

TEST(ContinuationPath, SingleStepMatchesRealizeAngles) {
  const EmbeddedPolyhedron p = fixtures::cube().at_scale(0.5);
  AngleVector target = dihedral_angles(p);
  target(5) -= 0.01;
  const PathResult path = continuation_path(p, target, 1);
  ASSERT_TRUE(path.ok());
  ASSERT_EQ(path.waypoints.size(), 1u);
  EXPECT_LT(vertex_gap(path.waypoints[0].final, realize_angles(p, target).final), 1e-14);
}

TEST(ContinuationPath, TetrahedronTowardCommonAngle) {
  EmbeddedPolyhedron p = fixtures::tetrahedron().at_scale(0.5);
  // Start from a non-regular tetrahedron and drive every angle to a common value.
  p.positions[3] *= 0.8;
  const AngleVector start = dihedral_angles(p);
  const AngleVector target = AngleVector::Constant(6, start.mean());
  const PathResult path = continuation_path(p, target, 5);
  ASSERT_TRUE(path.ok()) << path.failure->message;
  for (const DeformResult& w : path.waypoints) EXPECT_TRUE(rigidity_report(w.final).certified);
  EXPECT_LT(max_abs(path.waypoints.back().achieved_angles - target), 1e-10);
}

TEST(ContinuationPath, ConvexityLostKeepsEarlierWaypoints) {
  const EmbeddedPolyhedron p = fixtures::tetrahedron().at_scale(0.5);
  AngleVector target = dihedral_angles(p);
  target(0) = 2.8;
  const PathResult path = continuation_path(p, target, 20);
  ASSERT_FALSE(path.ok());
  EXPECT_EQ(path.failure->kind, ErrorKind::ConvexityLost);
  EXPECT_EQ(static_cast<int>(path.waypoints.size()), path.failure->waypoint - 1);
  EXPECT_GE(path.waypoints.size(), 1u);
  for (const DeformResult& w : path.waypoints) EXPECT_TRUE(validate_embedding(w.final).ok);
}
