#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <array>
#include <cmath>
#include <complex>

#include "stokerlab/errors.hpp"
#include "stokerlab/tolerances.hpp"

// Minkowski model of hyperbolic 3-space. Coordinates (x1, x2, x3, x4) with
// signature (+,+,+,-); x4 is the timelike coordinate. Polyhedron vertices are
// stored in the Klein ball and lifted to the hyperboloid for isometry algebra.

namespace stokerlab {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;
using Complex = std::complex<double>;
using Mat2c = Eigen::Matrix2cd;

inline const Mat4& minkowski_metric() {
  static const Mat4 j = Eigen::Vector4d(1.0, 1.0, 1.0, -1.0).asDiagonal();
  return j;
}

enum class Causality { Timelike, Spacelike, Lightlike };

struct MinkowskiVector {
  Vec4 x = Vec4::Zero();

  MinkowskiVector() = default;
  explicit MinkowskiVector(const Vec4& coords) : x(coords) {}
  MinkowskiVector(double x1, double x2, double x3, double x4) : x(x1, x2, x3, x4) {}

  double operator[](int i) const { return x(i); }
};

inline double minkowski_inner(const MinkowskiVector& u, const MinkowskiVector& v) {
  return u.x(0) * v.x(0) + u.x(1) * v.x(1) + u.x(2) * v.x(2) - u.x(3) * v.x(3);
}

inline double minkowski_inner(const Vec4& u, const Vec4& v) {
  return u(0) * v(0) + u(1) * v(1) + u(2) * v(2) - u(3) * v(3);
}

inline Causality classify(const MinkowskiVector& v, const Tolerances& tol = {}) {
  const double q = minkowski_inner(v, v);
  if (std::abs(q) <= tol.light) return Causality::Lightlike;
  return q < 0.0 ? Causality::Timelike : Causality::Spacelike;
}

/// Point of the open unit ball (Klein model).
struct KleinPoint {
  Vec3 p = Vec3::Zero();

  KleinPoint() = default;
  explicit KleinPoint(const Vec3& coords) : p(coords) {}
  KleinPoint(double a, double b, double c) : p(a, b, c) {}
};

inline void require_in_ball(const KleinPoint& q, const Tolerances& tol) {
  if (!(q.p.norm() < 1.0 - tol.ball))
    throw Error(ErrorKind::BallBoundary, "point at Euclidean norm " + std::to_string(q.p.norm()) +
                                             " is not strictly inside the Klein ball");
}

/// (p, 1) / sqrt(1 - |p|^2): the hyperboloid point over a Klein point.
inline MinkowskiVector klein_lift(const KleinPoint& q, const Tolerances& tol = {}) {
  require_in_ball(q, tol);
  const double s = 1.0 / std::sqrt(1.0 - q.p.squaredNorm());
  return MinkowskiVector(s * q.p(0), s * q.p(1), s * q.p(2), s);
}

/// Central projection back to the ball; requires x4 != 0.
inline KleinPoint klein_project(const MinkowskiVector& v) {
  return KleinPoint(v.x.head<3>() / v.x(3));
}

inline double hyperbolic_distance(const KleinPoint& a, const KleinPoint& b, const Tolerances& tol = {}) {
  const Vec4 d = klein_lift(a, tol).x - klein_lift(b, tol).x;
  // |P-Q|^2 = 2 cosh(r) - 2 = 4 sinh^2(r/2); stable for nearby points.
  const double chord = std::sqrt(std::max(0.0, minkowski_inner(d, d)));
  return 2.0 * std::asinh(chord / 2.0);
}

/// Hyperbolic plane with unit spacelike normal. The interior half-space is
/// {x : <x, normal> < 0}; the normal points away from the interior.
struct Plane {
  MinkowskiVector normal;
};

namespace detail {

// w with w . x = det[a; b; c; x] (Euclidean dot), the 4D cross product.
inline Vec4 cross4(const Vec4& a, const Vec4& b, const Vec4& c) {
  Vec4 w;
  Mat4 m;
  m.row(0) = a;
  m.row(1) = b;
  m.row(2) = c;
  for (int j = 0; j < 4; ++j) {
    m.row(3) = Vec4::Unit(j);
    w(j) = m.determinant();
  }
  return w;
}

inline double smallest_relative_sv(const Vec4& a, const Vec4& b, const Vec4& c) {
  Eigen::Matrix<double, 3, 4> m;
  m.row(0) = a.normalized();
  m.row(1) = b.normalized();
  m.row(2) = c.normalized();
  Eigen::JacobiSVD<Eigen::Matrix<double, 3, 4>> svd(m);
  const auto& s = svd.singularValues();
  return s(2) / s(0);
}

}  // namespace detail

/// Plane through three Klein points, oriented so that the witness lies on the
/// interior side.
inline Plane plane_through(const KleinPoint& p1, const KleinPoint& p2, const KleinPoint& p3,
                           const KleinPoint& interior_witness, const Tolerances& tol = {}) {
  const Vec4 a = klein_lift(p1, tol).x;
  const Vec4 b = klein_lift(p2, tol).x;
  const Vec4 c = klein_lift(p3, tol).x;
  if (detail::smallest_relative_sv(a, b, c) < tol.rank_degenerate)
    throw Error(ErrorKind::DegenerateFace, "plane points are collinear");
  const Vec4 w = detail::cross4(a, b, c);
  Vec4 n = minkowski_metric() * w;  // <n, x> = w . x
  const double q = minkowski_inner(n, n);
  if (!(q > 0.0)) throw Error(ErrorKind::DegenerateFace, "plane normal is not spacelike");
  n /= std::sqrt(q);
  const double side = minkowski_inner(n, klein_lift(interior_witness, tol).x);
  if (std::abs(side) < tol.rank_degenerate)
    throw Error(ErrorKind::AmbiguousOrientation, "interior witness lies on the plane");
  if (side > 0.0) n = -n;
  return Plane{MinkowskiVector(n)};
}

/// Orientation-reversing Lorentz reflection. Only products of an even number
/// of reflections are isometries in the sense of `Isometry`.
struct Reflection {
  Mat4 matrix = Mat4::Identity();
};

/// Orientation- and time-preserving Lorentz transformation.
struct Isometry {
  Mat4 matrix = Mat4::Identity();

  static Isometry identity() { return Isometry{}; }

  Isometry operator*(const Isometry& other) const { return Isometry{matrix * other.matrix}; }
  MinkowskiVector apply(const MinkowskiVector& v) const { return MinkowskiVector(matrix * v.x); }
  KleinPoint apply(const KleinPoint& q, const Tolerances& tol = {}) const {
    return klein_project(apply(klein_lift(q, tol)));
  }
  Isometry inverse() const {
    const Mat4& j = minkowski_metric();
    return Isometry{j * matrix.transpose() * j};
  }
};

inline Isometry operator*(const Reflection& a, const Reflection& b) {
  return Isometry{a.matrix * b.matrix};
}

inline double lorentz_defect(const Mat4& m) {
  const Mat4& j = minkowski_metric();
  return (m.transpose() * j * m - j).cwiseAbs().maxCoeff();
}

inline bool is_isometry(const Mat4& m, const Tolerances& tol = {}) {
  return lorentz_defect(m) < tol.iso && std::abs(m.determinant() - 1.0) < 1e3 * tol.iso &&
         m(3, 3) > 0.0;
}

/// x -> x - 2 <x, n> n.
inline Reflection reflect(const Plane& plane) {
  const Vec4& n = plane.normal.x;
  return Reflection{Mat4::Identity() - 2.0 * n * (minkowski_metric() * n).transpose()};
}

/// Elliptic isometry fixing the geodesic through a and b pointwise and rotating
/// by theta. The positive sense is right-handed about the direction a -> b.
inline Isometry rotation_about_edge(const KleinPoint& a, const KleinPoint& b, double theta,
                                    const Tolerances& tol = {}) {
  if (hyperbolic_distance(a, b, tol) < tol.axis)
    throw Error(ErrorKind::DegenerateAxis, "rotation axis endpoints coincide");
  const Vec4 et = klein_lift(a, tol).x;
  const Vec4 pb = klein_lift(b, tol).x;
  Vec4 es = pb + minkowski_inner(et, pb) * et;
  es /= std::sqrt(minkowski_inner(es, es));

  // First spacelike complement vector: best-conditioned projected basis vector.
  Vec4 u1 = Vec4::Zero();
  double best = -1.0;
  for (int k = 0; k < 4; ++k) {
    const Vec4 e = Vec4::Unit(k);
    const Vec4 cand = e + minkowski_inner(e, et) * et - minkowski_inner(e, es) * es;
    const double q = minkowski_inner(cand, cand);
    if (q > best + 1e-12) {
      best = q;
      u1 = cand;
    }
  }
  u1 /= std::sqrt(best);
  Vec4 u2 = minkowski_metric() * detail::cross4(u1, es, et);
  u2 /= std::sqrt(minkowski_inner(u2, u2));
  Mat4 frame;
  frame << u1, u2, es, et;
  if (frame.determinant() < 0.0) u2 = -u2;

  const Mat4& j = minkowski_metric();
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Mat4 m = Mat4::Identity();
  m += (c - 1.0) * (u1 * (j * u1).transpose() + u2 * (j * u2).transpose());
  m += s * (u2 * (j * u1).transpose() - u1 * (j * u2).transpose());
  return Isometry{m};
}

/// Element of the Lie algebra so(3,1): A^T J + J A = 0.
struct IsometryGenerator {
  Mat4 matrix = Mat4::Zero();

  Isometry exp(double t) const { return Isometry{(t * matrix).exp()}; }
};

/// Rotations about the x1, x2, x3 axes followed by boosts along x1, x2, x3.
inline std::array<IsometryGenerator, 6> so31_basis() {
  std::array<IsometryGenerator, 6> basis;
  const int pairs[3][2] = {{1, 2}, {2, 0}, {0, 1}};
  for (int k = 0; k < 3; ++k) {
    Mat4& r = basis[k].matrix;
    r(pairs[k][1], pairs[k][0]) = 1.0;
    r(pairs[k][0], pairs[k][1]) = -1.0;
    Mat4& b = basis[3 + k].matrix;
    b(k, 3) = 1.0;
    b(3, k) = 1.0;
  }
  return basis;
}

namespace detail {

inline const std::array<Mat2c, 4>& pauli_basis() {
  // Index order matches Minkowski coordinates: sigma_1, sigma_2, sigma_3, I.
  static const std::array<Mat2c, 4> basis = [] {
    const Complex i(0.0, 1.0);
    std::array<Mat2c, 4> b;
    b[0] << 0.0, 1.0, 1.0, 0.0;
    b[1] << 0.0, -i, i, 0.0;
    b[2] << 1.0, 0.0, 0.0, -1.0;
    b[3] << 1.0, 0.0, 0.0, 1.0;
    return b;
  }();
  return basis;
}

}  // namespace detail

/// Hermitian matrix of a Minkowski vector; det = -<x, x>.
inline Mat2c hermitian_of(const Vec4& x) {
  const auto& s = detail::pauli_basis();
  return x(0) * s[0] + x(1) * s[1] + x(2) * s[2] + x(3) * s[3];
}

/// The double cover SL(2,C) -> SO+(3,1): X(L x) = S X(x) S^*.
inline Isometry lorentz_of(const Mat2c& s) {
  const auto& sigma = detail::pauli_basis();
  Mat4 m;
  for (int nu = 0; nu < 4; ++nu) {
    const Mat2c image = s * sigma[nu] * s.adjoint();
    for (int mu = 0; mu < 4; ++mu) m(mu, nu) = 0.5 * (sigma[mu] * image).trace().real();
  }
  return Isometry{m};
}

namespace detail {

// Sign normalization of a lift: Re tr > 0, else Im tr > 0, else the first
// non-negligible entry in row-major order has positive real (then imaginary) part.
inline Mat2c normalize_lift_sign(const Mat2c& s) {
  constexpr double eps = 1e-12;
  auto positive = [](Complex z) {
    if (std::abs(z.real()) > eps) return z.real() > 0.0;
    return z.imag() > 0.0;
  };
  const Complex tr = s.trace();
  if (std::abs(tr) > eps) return positive(tr) ? s : Mat2c(-s);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c)
      if (std::abs(s(r, c)) > eps) return positive(s(r, c)) ? s : Mat2c(-s);
  return s;
}

}  // namespace detail

/// SL(2,C) lift of an isometry. Of the two preimages {S, -S} the branch with
/// Re tr S > 0 is returned (ties broken by Im tr, then by the first non-zero
/// entry). For an elliptic rotation by theta this gives tr S = 2|cos(theta/2)|.
inline Mat2c sl2c_lift(const Isometry& l, const Tolerances& tol = {}) {
  if (!is_isometry(l.matrix, tol)) throw Error(ErrorKind::LiftFailure, "matrix is not in SO+(3,1)");
  const auto& sigma = detail::pauli_basis();
  // sum_nu X(L e_nu) A sigma_nu = 2 tr(S^* A) S for any A; pick the best A.
  Mat2c best = Mat2c::Zero();
  double best_norm = -1.0;
  for (const Mat2c& a : sigma) {
    Mat2c m = Mat2c::Zero();
    for (int nu = 0; nu < 4; ++nu) {
      Mat2c image = Mat2c::Zero();
      for (int mu = 0; mu < 4; ++mu) image += l.matrix(mu, nu) * sigma[mu];
      m += image * a * sigma[nu];
    }
    const double norm = m.norm();
    if (norm > best_norm) {
      best_norm = norm;
      best = m;
    }
  }
  const Mat2c s = best / std::sqrt(best.determinant());
  if ((lorentz_of(s).matrix - l.matrix).cwiseAbs().maxCoeff() > 1e4 * tol.iso)
    throw Error(ErrorKind::LiftFailure, "lift does not reproduce the isometry");
  return detail::normalize_lift_sign(s);
}

}  // namespace stokerlab
