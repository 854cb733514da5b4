#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "stokerlab/linalg.hpp"
#include "stokerlab/lorentz.hpp"
#include "stokerlab/polyhedron.hpp"

// Representations of finitely presented groups into SL(2,C), their first-order
// deformations (cocycles), trivial deformations (coboundaries) and the
// differentials of trace functions.

namespace stokerlab {

using linalg::Matrix;

/// Word in the generators: letter +k is generator k (1-based), -k its inverse.
using Word = std::vector<int>;

struct Presentation {
  int generator_count = 0;
  std::vector<Word> relators;

  void check_word(const Word& w) const {
    for (int letter : w)
      if (letter == 0 || std::abs(letter) > generator_count)
        throw Error(ErrorKind::IndexRange, "letter " + std::to_string(letter) + " outside 1.." +
                                               std::to_string(generator_count));
  }

  void validate() const {
    if (generator_count < 0) throw Error(ErrorKind::IndexRange, "negative generator count");
    for (const Word& r : relators) {
      if (r.empty()) throw Error(ErrorKind::IndexRange, "empty relator");
      check_word(r);
    }
  }

  /// 1 - generators + relators: the Euler characteristic of the presentation complex.
  int euler_characteristic() const { return 1 - generator_count + static_cast<int>(relators.size()); }
};

struct Representation {
  std::vector<Mat2c> images;

  int generator_count() const { return static_cast<int>(images.size()); }
};

/// Traceless values of a first-order deformation on the generators.
struct Cocycle {
  std::vector<Mat2c> values;
};

namespace detail {

inline const Mat2c& generator_image(const Representation& rho, int letter) {
  const int g = std::abs(letter) - 1;
  if (letter == 0 || g >= rho.generator_count())
    throw Error(ErrorKind::IndexRange, "letter " + std::to_string(letter) + " outside the representation");
  return rho.images[g];
}

// Inverse of an SL(2,C) matrix via the adjugate.
inline Mat2c sl2_inverse(const Mat2c& m) {
  Mat2c inv;
  inv << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
  return inv;
}

inline Mat2c letter_image(const Representation& rho, int letter) {
  const Mat2c& m = generator_image(rho, letter);
  return letter > 0 ? m : sl2_inverse(m);
}

inline double distance_to_plus_minus_identity(const Mat2c& m, int* sign = nullptr) {
  const Mat2c id = Mat2c::Identity();
  const double plus = (m - id).cwiseAbs().maxCoeff();
  const double minus = (m + id).cwiseAbs().maxCoeff();
  if (sign) *sign = plus <= minus ? 1 : -1;
  return std::min(plus, minus);
}

// Real basis of sl(2,C): i sigma_1..3 (spanning su(2)) then sigma_1..3.
inline const std::array<Mat2c, 6>& sl2c_real_basis() {
  static const std::array<Mat2c, 6> basis = [] {
    const auto& s = detail::pauli_basis();
    const Complex i(0.0, 1.0);
    return std::array<Mat2c, 6>{i * s[0], i * s[1], i * s[2], s[0], s[1], s[2]};
  }();
  return basis;
}

inline int algebra_dim(bool unitary) { return unitary ? 3 : 6; }

inline Mat2c algebra_element(const double* coords, bool unitary) {
  Mat2c m = Mat2c::Zero();
  for (int k = 0; k < algebra_dim(unitary); ++k) m += coords[k] * sl2c_real_basis()[k];
  return m;
}

inline void push_real_entries(Eigen::VectorXd& out, Eigen::Index offset, const Mat2c& m) {
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      out(offset + 4 * r + 2 * c) = m(r, c).real();
      out(offset + 4 * r + 2 * c + 1) = m(r, c).imag();
    }
}

}  // namespace detail

/// Ordered product of generator images (and inverses) along the word.
inline Mat2c evaluate_word(const Representation& rho, const Word& w) {
  Mat2c acc = Mat2c::Identity();
  for (int letter : w) acc = acc * detail::letter_image(rho, letter);
  return acc;
}

inline Mat2c adjoint_action(const Mat2c& g, const Mat2c& x) { return g * x * detail::sl2_inverse(g); }

/// Extends generator values to the word by u(ab) = u(a) + Ad(rho(a)) u(b),
/// with u(g^-1) = -Ad(rho(g)^-1) u(g).
inline Mat2c cocycle_extend(const Cocycle& u, const Representation& rho, const Word& w) {
  Mat2c acc_u = Mat2c::Zero();
  Mat2c acc_m = Mat2c::Identity();
  for (int letter : w) {
    const Mat2c& g = detail::generator_image(rho, letter);
    const int idx = std::abs(letter) - 1;
    if (idx >= static_cast<int>(u.values.size())) throw Error(ErrorKind::IndexRange, "cocycle too short");
    const Mat2c value = letter > 0 ? u.values[idx] : Mat2c(-adjoint_action(detail::sl2_inverse(g), u.values[idx]));
    acc_u += adjoint_action(acc_m, value);
    acc_m = acc_m * (letter > 0 ? g : detail::sl2_inverse(g));
  }
  return acc_u;
}

/// gamma -> v - Ad(rho(gamma)) v on the generators.
inline Cocycle coboundary(const Mat2c& v, const Representation& rho) {
  Cocycle u;
  u.values.reserve(rho.images.size());
  for (const Mat2c& g : rho.images) u.values.push_back(v - adjoint_action(g, v));
  return u;
}

/// d/dt tr(rho_t(w)) along the deformation u: tr(u(w) rho(w)).
inline Complex trace_differential(const Representation& rho, const Cocycle& u, const Word& w) {
  return (cocycle_extend(u, rho, w) * evaluate_word(rho, w)).trace();
}

struct RepresentationCheck {
  bool ok = true;
  double max_det_defect = 0.0;
  double max_relator_residual = 0.0;  // distance of each relator to +-I
  std::vector<int> relator_signs;
  std::vector<std::string> issues;
};

inline RepresentationCheck check_representation(const Representation& rho, const Presentation& pres,
                                                const Tolerances& tol = {}, bool sign_strict = false) {
  RepresentationCheck check;
  auto fail = [&check](std::string msg) {
    check.ok = false;
    check.issues.push_back(std::move(msg));
  };
  if (rho.generator_count() != pres.generator_count) {
    fail("representation has " + std::to_string(rho.generator_count()) + " images for " +
         std::to_string(pres.generator_count) + " generators");
    return check;
  }
  for (int g = 0; g < rho.generator_count(); ++g) {
    const double d = std::abs(rho.images[g].determinant() - 1.0);
    check.max_det_defect = std::max(check.max_det_defect, d);
    if (d >= tol.det) fail("generator " + std::to_string(g + 1) + " has |det - 1| = " + std::to_string(d));
  }
  for (std::size_t r = 0; r < pres.relators.size(); ++r) {
    int sign = 1;
    const double res = detail::distance_to_plus_minus_identity(evaluate_word(rho, pres.relators[r]), &sign);
    check.relator_signs.push_back(sign);
    check.max_relator_residual = std::max(check.max_relator_residual, res);
    if (res >= tol.relator) fail("relator " + std::to_string(r + 1) + " residual " + std::to_string(res));
    else if (sign_strict && sign < 0) fail("relator " + std::to_string(r + 1) + " evaluates to -I");
  }
  return check;
}

inline bool is_unitary(const Representation& rho, double tol = 1e-9) {
  for (const Mat2c& m : rho.images)
    if ((m * m.adjoint() - Mat2c::Identity()).cwiseAbs().maxCoeff() > tol) return false;
  return true;
}

/// Basis (as real coordinate columns) of a subspace of generator assignments.
/// Column layout: generator g occupies rows [a g, a g + a) with a = 3 (su(2))
/// or 6 (sl(2,C)) in the order of `detail::sl2c_real_basis`.
struct CocycleSpace {
  Matrix basis;
  bool unitary = false;
  linalg::RankInfo rank;

  int dimension() const { return static_cast<int>(basis.cols()); }
};

inline Cocycle cocycle_from_coordinates(const Eigen::VectorXd& coords, bool unitary) {
  const int a = detail::algebra_dim(unitary);
  Cocycle u;
  for (Eigen::Index g = 0; g < coords.size() / a; ++g) u.values.push_back(detail::algebra_element(coords.data() + a * g, unitary));
  return u;
}

namespace detail {

inline void require_unitary(const Representation& rho, bool unitary) {
  if (unitary && !is_unitary(rho)) throw Error(ErrorKind::NotUnitary, "representation is not SU(2)-valued");
}

}  // namespace detail

/// Z^1: nullspace of u -> (u(r))_r over all generator assignments.
inline CocycleSpace cocycle_space(const Representation& rho, const Presentation& pres, bool unitary = false,
                                  const Tolerances& tol = {}) {
  pres.validate();
  detail::require_unitary(rho, unitary);
  if (rho.generator_count() != pres.generator_count)
    throw Error(ErrorKind::InvalidRepresentation, "generator count mismatch");
  const int a = detail::algebra_dim(unitary);
  const int cols = a * pres.generator_count;
  Matrix map(8 * pres.relators.size(), cols);
  for (int j = 0; j < cols; ++j) {
    Eigen::VectorXd coords = Eigen::VectorXd::Unit(cols, j);
    const Cocycle u = cocycle_from_coordinates(coords, unitary);
    Eigen::VectorXd column(map.rows());
    for (std::size_t r = 0; r < pres.relators.size(); ++r)
      detail::push_real_entries(column, 8 * static_cast<Eigen::Index>(r), cocycle_extend(u, rho, pres.relators[r]));
    map.col(j) = column;
  }
  CocycleSpace z;
  z.unitary = unitary;
  z.basis = linalg::nullspace(map, tol.rank_rel, &z.rank);
  return z;
}

/// B^1: image of v -> coboundary(v) over the algebra.
inline CocycleSpace coboundary_space(const Representation& rho, bool unitary = false, const Tolerances& tol = {}) {
  detail::require_unitary(rho, unitary);
  const int a = detail::algebra_dim(unitary);
  Matrix image(a * rho.generator_count(), a);
  for (int k = 0; k < a; ++k) {
    const Cocycle u = coboundary(detail::sl2c_real_basis()[k], rho);
    for (int g = 0; g < rho.generator_count(); ++g)
      for (int c = 0; c < a; ++c) {
        // Coordinates in the real basis: sigma_k pairs as tr(sigma_k x)/2.
        const Complex t = 0.5 * (detail::pauli_basis()[c % 3] * u.values[g]).trace();
        image(a * g + c, k) = c < 3 ? t.imag() : t.real();
      }
  }
  CocycleSpace b;
  b.unitary = unitary;
  b.rank = linalg::numerical_rank(image, tol.rank_rel);
  b.basis = linalg::range_basis(image, tol.rank_rel);
  return b;
}

struct TraceRankReport {
  bool unitary = false;
  int loop_count = 0;
  int z1_dim = 0;
  int b1_dim = 0;
  int h1_dim = 0;
  int rank = 0;  // real rank of the trace differentials on H^1
  Eigen::VectorXd singular_values;
  double gap_ratio = 0.0;
};

/// Real rank of the trace differentials of `loops` on H^1 = Z^1 / B^1.
/// In the unitary case cocycles are su(2)-valued and only Re tr is used
/// (traces are real on SU(2)); otherwise Re tr and Im tr give two rows per loop.
inline TraceRankReport trace_rank(const Representation& rho, const Presentation& pres, const std::vector<Word>& loops,
                                  bool unitary = false, const Tolerances& tol = {}) {
  for (const Word& w : loops) pres.check_word(w);
  TraceRankReport rep;
  rep.unitary = unitary;
  rep.loop_count = static_cast<int>(loops.size());
  const CocycleSpace z = cocycle_space(rho, pres, unitary, tol);
  const CocycleSpace b = coboundary_space(rho, unitary, tol);
  rep.z1_dim = z.dimension();
  rep.b1_dim = b.dimension();
  // Complement of B^1 inside Z^1.
  const Matrix complement_raw = z.basis - b.basis * (b.basis.transpose() * z.basis);
  const Matrix h = linalg::range_basis(complement_raw, tol.rank_rel);
  rep.h1_dim = static_cast<int>(h.cols());
  const int rows_per_loop = unitary ? 1 : 2;
  Matrix tmap(rows_per_loop * loops.size(), h.cols());
  for (Eigen::Index j = 0; j < h.cols(); ++j) {
    const Cocycle u = cocycle_from_coordinates(h.col(j), unitary);
    for (std::size_t l = 0; l < loops.size(); ++l) {
      const Complex d = trace_differential(rho, u, loops[l]);
      tmap(rows_per_loop * l, j) = d.real();
      if (!unitary) tmap(rows_per_loop * l + 1, j) = d.imag();
    }
  }
  const linalg::RankInfo info = linalg::numerical_rank(tmap, tol.rank_rel);
  rep.rank = info.rank;
  rep.singular_values = info.singular_values;
  if (info.rank > 0) {
    const double kept = info.singular_values(info.rank - 1);
    double gap = kept / info.threshold;
    if (info.rank < info.singular_values.size()) {
      const double next = info.singular_values(info.rank);
      gap = next > 0.0 ? std::min(gap, kept / next) : gap;
    }
    rep.gap_ratio = gap;
  }
  return rep;
}

struct IrreducibilityResult {
  bool irreducible = true;
  double residual = 0.0;  // min over candidate lines of the max projective residual
  std::optional<Eigen::Vector2cd> witness;
};

namespace detail {

inline std::array<Eigen::Vector2cd, 2> eigenvectors(const Mat2c& m) {
  const Complex tr = m.trace();
  const Complex root = std::sqrt(tr * tr - 4.0 * m.determinant());
  std::array<Eigen::Vector2cd, 2> out;
  for (int k = 0; k < 2; ++k) {
    const Complex lambda = 0.5 * (tr + (k == 0 ? root : -root));
    Eigen::Vector2cd a(m(0, 1), lambda - m(0, 0));
    Eigen::Vector2cd b(lambda - m(1, 1), m(1, 0));
    Eigen::Vector2cd v = a.norm() >= b.norm() ? a : b;
    out[k] = v.normalized();
  }
  if (std::abs(out[1](0)) > std::abs(out[0](0))) std::swap(out[0], out[1]);
  return out;
}

inline double projective_residual(const Mat2c& g, const Eigen::Vector2cd& xi) {
  const Eigen::Vector2cd gx = g * xi;
  const double n = gx.norm() * xi.norm();
  return n > 0.0 ? std::abs(gx(0) * xi(1) - gx(1) * xi(0)) / n : 0.0;
}

}  // namespace detail

/// A representation into SL(2,C) is reducible iff all images share an
/// eigenvector. Candidate lines are the eigenvectors of the first generator
/// with distinct eigenvalues.
inline IrreducibilityResult irreducibility_check(const Representation& rho, const Tolerances& tol = {}) {
  IrreducibilityResult result;
  const Mat2c* pivot = nullptr;
  bool defective = false;
  for (const Mat2c& g : rho.images) {
    if (detail::distance_to_plus_minus_identity(g) < tol.irreducible) continue;
    const Complex tr = g.trace();
    if (std::abs(tr * tr - 4.0 * g.determinant()) > tol.irreducible) {
      pivot = &g;
      break;
    }
    defective = true;
  }
  if (pivot == nullptr) {
    if (defective) throw Error(ErrorKind::EigenFailure, "only parabolic non-central generators; no stable eigenbasis");
    result.irreducible = false;
    result.residual = 0.0;
    result.witness = Eigen::Vector2cd(1.0, 0.0);
    return result;
  }
  result.residual = std::numeric_limits<double>::infinity();
  for (const Eigen::Vector2cd& xi : detail::eigenvectors(*pivot)) {
    double worst = 0.0;
    for (const Mat2c& g : rho.images) worst = std::max(worst, detail::projective_residual(g, xi));
    if (worst < result.residual - 1e-15) {
      result.residual = worst;
      result.witness = xi;
    }
  }
  result.irreducible = !(result.residual < tol.irreducible);
  if (result.irreducible) result.witness.reset();
  return result;
}

/// Elements of SL(2,C) with trace different from +-2 are conjugate iff their
/// traces agree.
inline bool conjugate_by_trace(const Mat2c& a, const Mat2c& b, double tol = 1e-9) {
  return std::abs(a.trace() - b.trace()) < tol;
}

/// C in SL(2,C) with C a C^-1 = b, for non-parabolic a, b with equal traces.
inline Mat2c conjugator(const Mat2c& a, const Mat2c& b, double tol = 1e-9) {
  const Complex tr = a.trace();
  if (!conjugate_by_trace(a, b, tol)) throw Error(ErrorKind::InvalidRepresentation, "traces differ");
  if (std::abs(tr * tr - 4.0) < tol) throw Error(ErrorKind::EigenFailure, "trace +-2: conjugacy not decided by trace");
  auto eigenbasis = [&tr](const Mat2c& m) {
    const Complex root = std::sqrt(tr * tr - 4.0);
    Mat2c p;
    for (int k = 0; k < 2; ++k) {
      const Complex lambda = 0.5 * (tr + (k == 0 ? root : -root));
      Eigen::Vector2cd u(m(0, 1), lambda - m(0, 0));
      Eigen::Vector2cd v(lambda - m(1, 1), m(1, 0));
      p.col(k) = (u.norm() >= v.norm() ? u : v).normalized();
    }
    return p;
  };
  const Mat2c pa = eigenbasis(a);
  const Mat2c pb = eigenbasis(b);
  Mat2c c = pb * pa.inverse();
  c /= std::sqrt(c.determinant());
  return c;
}

// ---------------------------------------------------------------------------
// Holonomy of the double of a polyhedron.

struct MeridianHolonomy {
  int edge = 0;
  double dihedral_angle = 0.0;
  Isometry holonomy;  // reflect(left face) * reflect(right face)
  Mat2c lift;
};

inline MeridianHolonomy meridian_holonomy(const EmbeddedPolyhedron& p, int e, const Tolerances& tol = {}) {
  if (e < 0 || e >= p.comb().edge_count()) throw Error(ErrorKind::IndexRange, "edge index out of range");
  const std::vector<Plane> planes = face_planes(p, tol);
  const Edge& edge = p.comb().edge(e);
  MeridianHolonomy m;
  m.edge = e;
  m.dihedral_angle = dihedral_from_normals(planes[edge.left_face], planes[edge.right_face]);
  m.holonomy = reflect(planes[edge.left_face]) * reflect(planes[edge.right_face]);
  m.lift = sl2c_lift(m.holonomy, tol);
  return m;
}

/// Pure boost taking the lift of q to (0,0,0,1).
inline Isometry centering_boost(const KleinPoint& q, const Tolerances& tol = {}) {
  const Vec4 x = klein_lift(q, tol).x;
  const double gamma = x(3);
  const Vec3 gb = x.head<3>();
  Mat4 boost = Mat4::Identity();
  const double b2 = gb.squaredNorm();
  if (b2 > 0.0) boost.topLeftCorner<3, 3>() += (gamma - 1.0) * gb * gb.transpose() / b2;
  boost.topRightCorner<3, 1>() = gb;
  boost.bottomLeftCorner<1, 3>() = gb.transpose();
  boost(3, 3) = gamma;
  return Isometry{boost}.inverse();
}

/// Holonomy of the spherical link of a vertex, conjugated so that the vertex
/// sits at the origin (the meridians then lie in SU(2)).
struct LinkRepresentation {
  int vertex = 0;
  Isometry frame;               // conjugation applied to the ambient holonomy
  std::vector<int> edges;       // star order
  std::vector<Mat2c> meridians; // SL(2,C) lifts, star order
  std::vector<double> cone_angles;

  int valence() const { return static_cast<int>(meridians.size()); }

  /// <g_1, ..., g_d | g_1 ... g_d>.
  Presentation presentation() const {
    Presentation pres;
    pres.generator_count = valence();
    Word r;
    for (int k = 1; k <= valence(); ++k) r.push_back(k);
    pres.relators.push_back(r);
    return pres;
  }

  Representation representation() const { return Representation{meridians}; }

  std::vector<Word> meridian_loops() const {
    std::vector<Word> loops;
    for (int k = 1; k <= valence(); ++k) loops.push_back({k});
    return loops;
  }
};

/// Meridian k is the product of the reflections in consecutive star faces
/// k and k+1, so the cyclic product telescopes to the identity.
inline LinkRepresentation link_representation(const EmbeddedPolyhedron& p, int v, const Tolerances& tol = {}) {
  if (v < 0 || v >= p.vertex_count()) throw Error(ErrorKind::IndexRange, "vertex index out of range");
  const std::vector<Plane> planes = face_planes(p, tol);
  const AngleVector angles = dihedral_angles(p, tol);
  const VertexStar& star = p.comb().star(v);
  LinkRepresentation link;
  link.vertex = v;
  link.frame = centering_boost(p.point(v), tol);
  const Isometry frame_inv = link.frame.inverse();
  const int d = static_cast<int>(star.faces.size());
  for (int k = 0; k < d; ++k) {
    const Isometry m = reflect(planes[star.faces[k]]) * reflect(planes[star.faces[(k + 1) % d]]);
    link.edges.push_back(star.edges[k]);
    link.meridians.push_back(sl2c_lift(link.frame * m * frame_inv, tol));
    link.cone_angles.push_back(2.0 * angles(star.edges[k]));
  }
  return link;
}

/// Fundamental group of the boundary surface of a regular neighbourhood of the
/// edge graph, built by amalgamating vertex links along a spanning tree and
/// adding one HNN generator per remaining edge, with the holonomy of the double.
struct SurfaceGroup {
  Presentation presentation;
  Representation representation;
  std::vector<Word> edge_loops;   // meridian word for each edge (lexicographic order)
  std::vector<int> tree_edges;
  std::vector<int> hnn_edges;
  int genus = 0;

  /// 2 (2|E| + sum_v (2 d(v) - 6)): trace and completing coordinates count.
  int coordinate_count = 0;
};

inline SurfaceGroup boundary_surface_group(const EmbeddedPolyhedron& p, const Tolerances& tol = {}) {
  const CombinatorialType& c = p.comb();
  const std::vector<Plane> planes = face_planes(p, tol);
  SurfaceGroup s;
  std::vector<int> base(c.vertex_count());
  int n = 0;
  for (int v = 0; v < c.vertex_count(); ++v) {
    base[v] = n;
    n += c.valence(v);
  }
  // Generators: star meridians of every vertex, then one per non-tree edge.
  for (int v = 0; v < c.vertex_count(); ++v) {
    const VertexStar& star = c.star(v);
    const int d = c.valence(v);
    Word relator;
    for (int k = 0; k < d; ++k) {
      const Isometry m = reflect(planes[star.faces[k]]) * reflect(planes[star.faces[(k + 1) % d]]);
      s.representation.images.push_back(sl2c_lift(m, tol));
      relator.push_back(base[v] + k + 1);
    }
    s.presentation.relators.push_back(relator);
  }
  auto letter = [&](int v, int e) {
    const auto& edges = c.star(v).edges;
    return base[v] + static_cast<int>(std::find(edges.begin(), edges.end(), e) - edges.begin()) + 1;
  };

  std::vector<bool> in_tree(c.edge_count(), false), seen(c.vertex_count(), false);
  std::queue<int> queue;
  queue.push(0);
  seen[0] = true;
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop();
    std::vector<int> nbrs = c.star(v).neighbors;
    std::sort(nbrs.begin(), nbrs.end());
    for (int w : nbrs)
      if (!seen[w]) {
        seen[w] = true;
        in_tree[c.edge_index(v, w)] = true;
        queue.push(w);
      }
  }
  for (int e = 0; e < c.edge_count(); ++e) {
    const Edge& edge = c.edge(e);
    const int ga = letter(edge.a, e);
    const int gb = letter(edge.b, e);
    if (in_tree[e]) {
      s.tree_edges.push_back(e);
      s.presentation.relators.push_back({ga, gb});
    } else {
      s.hnn_edges.push_back(e);
      s.representation.images.push_back(Mat2c::Identity());
      const int t = static_cast<int>(s.representation.images.size());
      s.presentation.relators.push_back({t, ga, -t, gb});
    }
    s.edge_loops.push_back({ga});
  }
  s.presentation.generator_count = s.representation.generator_count();
  s.genus = c.edge_count() - c.vertex_count() + 1;
  int vertex_terms = 0;
  for (int v = 0; v < c.vertex_count(); ++v) vertex_terms += 2 * c.valence(v) - 6;
  s.coordinate_count = 2 * (2 * c.edge_count() + vertex_terms);
  return s;
}

}  // namespace stokerlab
