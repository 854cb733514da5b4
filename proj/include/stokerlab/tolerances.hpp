#pragma once

#include <cstdlib>
#include <string>

namespace stokerlab {

/// Every numeric threshold used by the library lives here. Absolute values
/// are calibrated for Klein-ball data (coordinates of magnitude at most 1);
/// `rank_rel` and `rank_degenerate` are relative to the largest singular value.
struct Tolerances {
  double ball = 1e-9;             // margin inside the unit ball
  double norm = 1e-10;            // |<n,n> - 1| for unit plane normals
  double iso = 1e-10;             // |L^T J L - J| for Lorentz matrices
  double axis = 1e-8;             // minimal hyperbolic length of a rotation axis
  double light = 1e-12;           // |<v,v>| below this is lightlike
  double rank_degenerate = 1e-10; // relative sv cutoff for plane/frame construction
  double planar = 1e-9;           // planarity determinant residual
  double convex = 1e-10;          // minimal convexity determinant
  double rank_rel = 1e-9;         // relative sv cutoff for ranks and nullspaces
  double principal_angle = 1e-6;  // kernel vs isometry directions, radians
  double relator = 1e-8;          // relator evaluates to +-I
  double det = 1e-10;             // |det - 1| of SL(2,C) images
  double irreducible = 1e-8;      // projective residual of a common eigenvector

  [[nodiscard]] Tolerances scaled(double factor) const {
    Tolerances t = *this;
    t.ball *= factor;
    t.norm *= factor;
    t.iso *= factor;
    t.axis *= factor;
    t.light *= factor;
    t.rank_degenerate *= factor;
    t.planar *= factor;
    t.convex *= factor;
    t.rank_rel *= factor;
    t.principal_angle *= factor;
    t.relator *= factor;
    t.det *= factor;
    t.irreducible *= factor;
    return t;
  }
};

/// Defaults multiplied by STOKERLAB_TOL_SCALE when that variable is set to a
/// positive number.
inline Tolerances tolerances_from_environment() {
  const char* raw = std::getenv("STOKERLAB_TOL_SCALE");
  if (raw == nullptr || *raw == '\0') return Tolerances{};
  char* end = nullptr;
  const double factor = std::strtod(raw, &end);
  if (end == raw || !(factor > 0.0)) return Tolerances{};
  return Tolerances{}.scaled(factor);
}

}  // namespace stokerlab
