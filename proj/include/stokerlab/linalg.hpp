#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace stokerlab::linalg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Singular value decomposition summary with a relative rank decision.
struct RankInfo {
  Vector singular_values;  // descending, length min(rows, cols)
  int rank = 0;
  double threshold = 0.0;  // absolute cutoff actually applied
};

inline RankInfo numerical_rank(const Matrix& a, double rel_tol) {
  RankInfo info;
  if (a.rows() == 0 || a.cols() == 0) {
    info.singular_values = Vector::Zero(0);
    return info;
  }
  Eigen::JacobiSVD<Matrix> svd(a);
  info.singular_values = svd.singularValues();
  const double top = info.singular_values(0);
  info.threshold = rel_tol * top;
  if (top == 0.0) return info;
  for (Eigen::Index i = 0; i < info.singular_values.size(); ++i)
    if (info.singular_values(i) > info.threshold) ++info.rank;
  return info;
}

/// Orthonormal basis of ker(a) (columns). An empty matrix (0 rows) has the
/// whole space as kernel.
inline Matrix nullspace(const Matrix& a, double rel_tol, RankInfo* info_out = nullptr) {
  const Eigen::Index n = a.cols();
  if (a.rows() == 0) {
    if (info_out) *info_out = RankInfo{Vector::Zero(0), 0, 0.0};
    return Matrix::Identity(n, n);
  }
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
  RankInfo info;
  info.singular_values = svd.singularValues();
  const double top = info.singular_values.size() ? info.singular_values(0) : 0.0;
  info.threshold = rel_tol * top;
  if (top > 0.0)
    for (Eigen::Index i = 0; i < info.singular_values.size(); ++i)
      if (info.singular_values(i) > info.threshold) ++info.rank;
  if (info_out) *info_out = info;
  return svd.matrixV().rightCols(n - info.rank);
}

/// Orthonormal basis of the column span of a.
inline Matrix range_basis(const Matrix& a, double rel_tol) {
  if (a.cols() == 0 || a.rows() == 0) return Matrix::Zero(a.rows(), 0);
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU);
  const Vector& s = svd.singularValues();
  int rank = 0;
  if (s.size() && s(0) > 0.0)
    for (Eigen::Index i = 0; i < s.size(); ++i)
      if (s(i) > rel_tol * s(0)) ++rank;
  return svd.matrixU().leftCols(rank);
}

/// Minimum-norm least-squares solution of a x = b, singular values below
/// rel_tol * sigma_1 treated as zero.
inline Vector pinv_solve(const Matrix& a, const Vector& b, double rel_tol) {
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  Vector coeffs = svd.matrixU().transpose() * b;
  const double cut = s.size() ? rel_tol * s(0) : 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) coeffs(i) = s(i) > cut ? coeffs(i) / s(i) : 0.0;
  return svd.matrixV() * coeffs;
}

/// Principal angles (radians, ascending) between the spans of two matrices
/// with orthonormal columns of equal count. Computed from sines so that small
/// angles keep full relative precision.
inline Vector principal_angles(const Matrix& q1, const Matrix& q2) {
  const Eigen::Index k = std::min(q1.cols(), q2.cols());
  if (k == 0) return Vector::Zero(0);
  const Matrix residual = q2 - q1 * (q1.transpose() * q2);
  Eigen::JacobiSVD<Matrix> svd(residual);
  Vector s = svd.singularValues();
  Vector angles(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const double sine = i < s.size() ? std::clamp(s(s.size() - 1 - i), 0.0, 1.0) : 0.0;
    angles(i) = std::asin(sine);
  }
  return angles;
}

/// Largest principal angle; pi/2 when the dimensions differ.
inline double subspace_distance(const Matrix& q1, const Matrix& q2) {
  if (q1.cols() != q2.cols()) return std::numbers::pi / 2;
  if (q1.cols() == 0) return 0.0;
  return principal_angles(q1, q2).maxCoeff();
}

}  // namespace stokerlab::linalg
