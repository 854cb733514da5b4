#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include "stokerlab/linalg.hpp"
#include "stokerlab/lorentz.hpp"
#include "stokerlab/polyhedron.hpp"

namespace stokerlab {

using linalg::Matrix;

/// d(planarity_residuals)/d(coordinates), (sum_f (d_f - 3)) x 3|V|.
inline Matrix constraint_jacobian(const EmbeddedPolyhedron& p) {
  const CombinatorialType& c = p.comb();
  Matrix jac = Matrix::Zero(c.planarity_count(), 3 * p.vertex_count());
  int row = 0;
  for (int f = 0; f < c.face_count(); ++f) {
    const Face& face = c.face(f);
    const Vec3& x0 = p.positions[face[0]];
    const Vec3 a = p.positions[face[1]] - x0;
    const Vec3 b = p.positions[face[2]] - x0;
    for (std::size_t i = 3; i < face.size(); ++i, ++row) {
      const Vec3 cvec = p.positions[face[i]] - x0;
      const Vec3 d1 = b.cross(cvec);
      const Vec3 d2 = cvec.cross(a);
      const Vec3 dv = a.cross(b);
      jac.block<1, 3>(row, 3 * face[1]) += d1.transpose();
      jac.block<1, 3>(row, 3 * face[2]) += d2.transpose();
      jac.block<1, 3>(row, 3 * face[i]) += dv.transpose();
      jac.block<1, 3>(row, 3 * face[0]) -= (d1 + d2 + dv).transpose();
    }
  }
  return jac;
}

namespace detail {

// Outward unit normal of a face and its derivative with respect to the nine
// anchor coordinates (anchor i, axis k) -> column 3 i + k.
struct NormalDerivative {
  Vec4 normal;
  Eigen::Matrix<double, 4, 9> d;
};

inline NormalDerivative face_normal_derivative(const EmbeddedPolyhedron& p, int f, const Plane& plane) {
  const Face& face = p.comb().face(f);
  std::array<Vec4, 3> lifted;
  for (int i = 0; i < 3; ++i) lifted[i] << p.positions[face[i]], 1.0;
  const Mat4& j = minkowski_metric();
  const Vec4 w = detail::cross4(lifted[0], lifted[1], lifted[2]);
  const double sigma = std::sqrt(w.dot(j * w));
  const double s = plane.normal.x.dot(j * w) > 0.0 ? 1.0 : -1.0;
  NormalDerivative out;
  out.normal = plane.normal.x;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) {
      std::array<Vec4, 3> l = lifted;
      l[i] = Vec4::Unit(k);
      const Vec4 dw = detail::cross4(l[0], l[1], l[2]);
      out.d.col(3 * i + k) = s * j * (dw / sigma - w * (w.dot(j * dw)) / (sigma * sigma * sigma));
    }
  return out;
}

}  // namespace detail

/// d(dihedral_angles)/d(coordinates), |E| x 3|V|. Each angle depends on the
/// anchors of its two faces only.
inline Matrix angle_jacobian(const EmbeddedPolyhedron& p, const Tolerances& tol = {}) {
  const CombinatorialType& c = p.comb();
  const std::vector<Plane> planes = face_planes(p, tol);
  std::vector<detail::NormalDerivative> nd;
  nd.reserve(c.face_count());
  for (int f = 0; f < c.face_count(); ++f) nd.push_back(detail::face_normal_derivative(p, f, planes[f]));

  const Mat4& j = minkowski_metric();
  Matrix jac = Matrix::Zero(c.edge_count(), 3 * p.vertex_count());
  for (int e = 0; e < c.edge_count(); ++e) {
    const Edge& edge = c.edge(e);
    const auto& left = nd[edge.left_face];
    const auto& right = nd[edge.right_face];
    const double cosine = std::clamp(left.normal.dot(j * right.normal), -1.0, 1.0);
    const double scale = 1.0 / std::sqrt(std::max(1e-300, 1.0 - cosine * cosine));
    const Eigen::Matrix<double, 1, 9> dl = (j * right.normal).transpose() * left.d;
    const Eigen::Matrix<double, 1, 9> dr = (j * left.normal).transpose() * right.d;
    for (int i = 0; i < 3; ++i) {
      jac.block<1, 3>(e, 3 * c.face(edge.left_face)[i]) += scale * dl.segment<3>(3 * i);
      jac.block<1, 3>(e, 3 * c.face(edge.right_face)[i]) += scale * dr.segment<3>(3 * i);
    }
  }
  return jac;
}

/// Orthonormal basis of the tangent space to the planarity constraint set.
struct TangentBasis {
  Matrix basis;  // 3|V| x k
  linalg::RankInfo constraint_rank;

  int dimension() const { return static_cast<int>(basis.cols()); }
};

inline TangentBasis tangent_space(const EmbeddedPolyhedron& p, const Tolerances& tol = {}) {
  TangentBasis t;
  t.basis = linalg::nullspace(constraint_jacobian(p), tol.rank_rel, &t.constraint_rank);
  const int expected = p.comb().edge_count() + 6;
  if (t.dimension() != expected)
    throw Error(ErrorKind::DimensionMismatch, "tangent dimension " + std::to_string(t.dimension()) +
                                                  ", expected |E|+6 = " + std::to_string(expected));
  return t;
}

/// Klein-coordinate velocity of every vertex under each so(3,1) generator,
/// 3|V| x 6.
inline Matrix isometry_directions(const EmbeddedPolyhedron& p, const Tolerances& tol = {}) {
  const auto basis = so31_basis();
  Matrix dirs(3 * p.vertex_count(), 6);
  for (int g = 0; g < 6; ++g)
    for (int v = 0; v < p.vertex_count(); ++v) {
      Vec4 x;
      x << p.positions[v], 1.0;
      const Vec4 ax = basis[g].matrix * x;
      // d/dt of (X + t A X)_{123} / (X + t A X)_4 at t = 0 with X_4 = 1.
      dirs.block<3, 1>(3 * v, g) = ax.head<3>() - p.positions[v] * ax(3);
    }
  if (linalg::numerical_rank(dirs, tol.rank_rel).rank < 6)
    throw Error(ErrorKind::RankDeficiency, "isometry directions have rank < 6");
  return dirs;
}

struct RigidityReport {
  int edge_count = 0;
  int tangent_dim = 0;
  int angle_rank = 0;
  int kernel_dim = 0;
  double isometry_containment_residual = std::numbers::pi / 2;
  /// Singular values of the angle Jacobian restricted to the tangent space,
  /// padded with zeros to the tangent dimension.
  Eigen::VectorXd singular_values;
  double gap_lower = 0.0;  // sigma_{|E|} / sigma_1
  double gap_upper = 0.0;  // sigma_{|E|+1} / sigma_1
  bool certified = false;
  std::optional<ErrorKind> failure;
  std::string failure_message;
};

/// Restricts the angle Jacobian to the tangent space of the constraint set and
/// compares its kernel with the isometry directions.
inline RigidityReport rigidity_report(const EmbeddedPolyhedron& p, const Tolerances& tol = {}) {
  RigidityReport r;
  r.edge_count = p.comb().edge_count();
  try {
    const TangentBasis tangent = tangent_space(p, tol);
    r.tangent_dim = tangent.dimension();
    const Matrix restricted = angle_jacobian(p, tol) * tangent.basis;
    const linalg::RankInfo info = linalg::numerical_rank(restricted, tol.rank_rel);
    r.angle_rank = info.rank;
    r.singular_values = Eigen::VectorXd::Zero(r.tangent_dim);
    r.singular_values.head(info.singular_values.size()) = info.singular_values;
    r.kernel_dim = r.tangent_dim - r.angle_rank;
    const double top = r.singular_values.size() ? r.singular_values(0) : 0.0;
    if (top > 0.0 && r.edge_count >= 1) {
      r.gap_lower = r.singular_values(r.edge_count - 1) / top;
      r.gap_upper = r.edge_count < r.tangent_dim ? r.singular_values(r.edge_count) / top : 0.0;
    }
    const Matrix kernel = tangent.basis * linalg::nullspace(restricted, tol.rank_rel);
    const Matrix iso = isometry_directions(p, tol);
    const Matrix iso_tangent = tangent.basis * (tangent.basis.transpose() * iso);
    r.isometry_containment_residual =
        linalg::subspace_distance(kernel, linalg::range_basis(iso_tangent, tol.rank_rel));
    r.certified = r.tangent_dim == r.edge_count + 6 && r.angle_rank == r.edge_count && r.kernel_dim == 6 &&
                  r.isometry_containment_residual < tol.principal_angle;
  } catch (const Error& e) {
    r.certified = false;
    r.failure = e.kind();
    r.failure_message = e.detail();
  }
  return r;
}

}  // namespace stokerlab
