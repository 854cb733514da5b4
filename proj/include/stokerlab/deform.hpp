#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "stokerlab/linalg.hpp"
#include "stokerlab/polyhedron.hpp"
#include "stokerlab/rigidity.hpp"

namespace stokerlab {

struct DeformOptions {
  int max_iterations = 50;      // per continuation stage
  double residual_tol = 1e-11;  // sup-norm of [planarity; angles - target]
  double step_damping = 1.0;
  int continuation_steps = 1;
  double trust_radius = 0.1;    // sup-norm of a coordinate step

  void validate() const {
    if (max_iterations < 1 || !(residual_tol >= 1e-14) || !(step_damping > 0.0 && step_damping <= 1.0) ||
        continuation_steps < 1 || !(trust_radius > 0.0))
      throw Error(ErrorKind::InvalidTarget, "invalid deform options");
  }
};

inline constexpr const char* kGaugeDescription =
    "vertex 0 at the origin, vertex 1 on the positive x-axis, vertex 2 in the upper half of the xy-plane";

struct DeformResult {
  EmbeddedPolyhedron final;
  int iterations_used = 0;
  std::vector<double> residual_history;
  AngleVector achieved_angles;
  std::string gauge = kGaugeDescription;
};

/// The isometry taking P to its gauge representative.
inline Isometry gauge_isometry(const EmbeddedPolyhedron& p, const Tolerances& tol = {}) {
  if (p.vertex_count() < 3) throw Error(ErrorKind::DegenerateFrame, "fewer than three vertices");
  const Vec4 x0 = klein_lift(p.point(0), tol).x;
  const Vec4 x1 = klein_lift(p.point(1), tol).x;
  const Vec4 x2 = klein_lift(p.point(2), tol).x;
  Vec4 f1 = x1 + minkowski_inner(x1, x0) * x0;
  const double n1 = minkowski_inner(f1, f1);
  if (!(n1 > 0.0) || std::sqrt(n1) < tol.axis) throw Error(ErrorKind::DegenerateFrame, "vertices 0 and 1 coincide");
  f1 /= std::sqrt(n1);
  const Vec4 x2perp = x2 + minkowski_inner(x2, x0) * x0;
  Vec4 f2 = x2perp - minkowski_inner(x2perp, f1) * f1;
  const double n2 = minkowski_inner(f2, f2);
  if (!(n2 > 0.0) || std::sqrt(n2) < tol.axis * std::sqrt(std::max(minkowski_inner(x2perp, x2perp), 1e-300)))
    throw Error(ErrorKind::DegenerateFrame, "vertices 0, 1, 2 are collinear");
  f2 /= std::sqrt(n2);
  Vec4 f3 = minkowski_metric() * detail::cross4(f1, f2, x0);
  f3 /= std::sqrt(minkowski_inner(f3, f3));
  Mat4 frame;
  frame << f1, f2, f3, x0;
  if (frame.determinant() < 0.0) frame.col(2) = -frame.col(2);
  return Isometry{frame}.inverse();
}

/// Canonical representative of the isometry orbit of P.
inline EmbeddedPolyhedron gauge_fix(const EmbeddedPolyhedron& p, const Tolerances& tol = {}) {
  return p.transformed(gauge_isometry(p, tol), tol);
}

namespace detail {

inline double sup_norm(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

inline void validate_target(const EmbeddedPolyhedron& p, const AngleVector& target) {
  if (target.size() != p.comb().edge_count())
    throw Error(ErrorKind::InvalidTarget, "target has " + std::to_string(target.size()) + " angles, expected " +
                                              std::to_string(p.comb().edge_count()));
  for (Eigen::Index e = 0; e < target.size(); ++e)
    if (!(target(e) > 0.0 && target(e) < std::numbers::pi))
      throw Error(ErrorKind::InvalidTarget, "target angle " + std::to_string(e) + " not in (0, pi)");
}

// Ball and convexity monitoring of an iterate.
inline void check_iterate(const EmbeddedPolyhedron& p, int iteration, const Tolerances& tol) {
  for (int v = 0; v < p.vertex_count(); ++v)
    if (!(p.positions[v].norm() < 1.0 - tol.ball))
      throw Error(ErrorKind::BallExit, "vertex " + std::to_string(v) + " left the ball at iteration " +
                                           std::to_string(iteration));
  const Eigen::VectorXd margins = convexity_margins(p);
  if (!(margins.minCoeff() > tol.convex))
    throw Error(ErrorKind::ConvexityLost, "convexity margin " + std::to_string(margins.minCoeff()) +
                                              " at iteration " + std::to_string(iteration));
}

inline Eigen::VectorXd stacked_residual(const EmbeddedPolyhedron& p, const AngleVector& target,
                                        const Tolerances& tol) {
  const Eigen::VectorXd planar = planarity_residuals(p);
  Eigen::VectorXd r(planar.size() + target.size());
  r.head(planar.size()) = planar;
  r.tail(target.size()) = dihedral_angles(p, tol) - target;
  return r;
}

// Gauss-Newton with minimum-norm steps for one target; updates `p` in place.
inline void newton_stage(EmbeddedPolyhedron& p, const AngleVector& target, const DeformOptions& opts,
                         const Tolerances& tol, DeformResult& out) {
  const int m = p.comb().planarity_count();
  for (int it = 0;; ++it) {
    const Eigen::VectorXd r = stacked_residual(p, target, tol);
    const double norm = sup_norm(r);
    out.residual_history.push_back(norm);
    if (norm <= opts.residual_tol) return;
    if (it == opts.max_iterations)
      throw Error(ErrorKind::NoConvergence, "residual " + std::to_string(norm) + " after " +
                                                std::to_string(opts.max_iterations) + " iterations");
    Matrix jac(m + target.size(), 3 * p.vertex_count());
    jac.topRows(m) = constraint_jacobian(p);
    jac.bottomRows(target.size()) = angle_jacobian(p, tol);
    const Eigen::VectorXd delta = linalg::pinv_solve(jac, -r, tol.rank_rel);
    double damping = opts.step_damping;
    while (damping * sup_norm(delta) > opts.trust_radius) damping *= 0.5;
    p = p.with_coordinates(p.coordinates() + damping * delta);
    ++out.iterations_used;
    check_iterate(p, out.iterations_used, tol);
  }
}

}  // namespace detail

/// Deforms P within its combinatorial type until its dihedral angles equal
/// `target`, then gauge-fixes the result. Continuation stages interpolate the
/// target linearly from the current angles.
inline DeformResult realize_angles(const EmbeddedPolyhedron& p, const AngleVector& target,
                                   const DeformOptions& opts = {}, const Tolerances& tol = {}) {
  opts.validate();
  require_valid_embedding(p, tol);
  detail::validate_target(p, target);
  const AngleVector start = dihedral_angles(p, tol);
  DeformResult out;
  EmbeddedPolyhedron current = p;
  for (int stage = 1; stage <= opts.continuation_steps; ++stage) {
    const double t = static_cast<double>(stage) / opts.continuation_steps;
    const AngleVector stage_target = stage == opts.continuation_steps ? target : AngleVector(start + t * (target - start));
    detail::newton_stage(current, stage_target, opts, tol, out);
  }
  out.final = gauge_fix(current, tol);
  out.achieved_angles = dihedral_angles(out.final, tol);
  return out;
}

struct PathFailure {
  ErrorKind kind;
  int waypoint = 0;  // 1-based index of the waypoint that failed
  std::string message;
};

struct PathResult {
  std::vector<DeformResult> waypoints;
  std::optional<PathFailure> failure;

  bool ok() const { return !failure.has_value(); }
};

/// Realizes n_steps evenly spaced waypoints from the current angles to
/// `target`, seeding each solve with the previous result. Stops at the first
/// failing waypoint and keeps the results before it.
inline PathResult continuation_path(const EmbeddedPolyhedron& p, const AngleVector& target, int n_steps,
                                    const DeformOptions& opts = {}, const Tolerances& tol = {}) {
  if (n_steps < 1) throw Error(ErrorKind::InvalidTarget, "n_steps must be positive");
  require_valid_embedding(p, tol);
  detail::validate_target(p, target);
  const AngleVector start = dihedral_angles(p, tol);
  PathResult path;
  EmbeddedPolyhedron current = p;
  for (int k = 1; k <= n_steps; ++k) {
    const double t = static_cast<double>(k) / n_steps;
    const AngleVector waypoint = k == n_steps ? target : AngleVector(start + t * (target - start));
    try {
      path.waypoints.push_back(realize_angles(current, waypoint, opts, tol));
      current = path.waypoints.back().final;
    } catch (const Error& e) {
      path.failure = PathFailure{e.kind(), k, e.detail()};
      break;
    }
  }
  return path;
}

}  // namespace stokerlab
