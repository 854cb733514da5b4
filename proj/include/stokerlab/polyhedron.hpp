#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <numeric>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "stokerlab/errors.hpp"
#include "stokerlab/lorentz.hpp"
#include "stokerlab/tolerances.hpp"

namespace stokerlab {

/// Cyclic vertex list of a face, counterclockwise seen from outside.
using Face = std::vector<int>;

/// Undirected edge a < b. `left_face` traverses a -> b, `right_face` b -> a.
struct Edge {
  int a = 0;
  int b = 0;
  int left_face = -1;
  int right_face = -1;
};

/// Cyclic neighbourhood of a vertex. edges[k] is shared by faces[k] and
/// faces[(k+1) % d]; faces[k] enters the vertex along edges[k] and
/// faces[k+1] leaves it along the same edge.
struct VertexStar {
  std::vector<int> faces;
  std::vector<int> edges;
  std::vector<int> neighbors;  // neighbors[k] is the far end of edges[k]
};

struct CombinatorialReport {
  bool ok = true;
  int vertex_count = 0;
  int edge_count = 0;
  int face_count = 0;
  int euler_characteristic = 0;
  std::vector<std::string> violations;
};

/// Checks every invariant of a closed convex-polyhedron combinatorics:
/// index ranges, face sizes, edge-face incidences with opposite traversal,
/// Euler characteristic 2, valence >= 3 and connectivity.
inline CombinatorialReport validate_combinatorics(int vertex_count, const std::vector<Face>& faces) {
  CombinatorialReport report;
  report.vertex_count = vertex_count;
  report.face_count = static_cast<int>(faces.size());
  auto fail = [&report](std::string msg) {
    report.ok = false;
    report.violations.push_back(std::move(msg));
  };
  if (vertex_count < 4) fail("fewer than 4 vertices");

  std::map<std::pair<int, int>, std::vector<int>> directed;  // (u,v) -> faces
  bool indices_ok = true;
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const Face& face = faces[f];
    if (face.size() < 3) fail("face " + std::to_string(f) + " has fewer than 3 vertices");
    for (int v : face) {
      if (v < 0 || v >= vertex_count) {
        fail("face " + std::to_string(f) + " references vertex " + std::to_string(v) + " out of range");
        indices_ok = false;
      }
    }
    Face sorted = face;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      fail("face " + std::to_string(f) + " repeats a vertex");
    for (std::size_t i = 0; i < face.size(); ++i)
      directed[{face[i], face[(i + 1) % face.size()]}].push_back(static_cast<int>(f));
  }
  if (!indices_ok) return report;

  std::map<std::pair<int, int>, int> undirected_count;
  for (const auto& [key, fs] : directed) {
    if (fs.size() > 1)
      fail("directed edge " + std::to_string(key.first) + "->" + std::to_string(key.second) +
           " traversed in the same direction by " + std::to_string(fs.size()) + " faces");
    const auto ukey = std::minmax(key.first, key.second);
    undirected_count[{ukey.first, ukey.second}] += static_cast<int>(fs.size());
  }
  for (const auto& [key, count] : undirected_count) {
    const bool forward = directed.count(key) && directed.at(key).size() == 1;
    const bool backward =
        directed.count({key.second, key.first}) && directed.at({key.second, key.first}).size() == 1;
    if (count != 2 || !forward || !backward)
      fail("edge {" + std::to_string(key.first) + "," + std::to_string(key.second) +
           "} does not belong to exactly two faces with opposite traversal");
  }
  report.edge_count = static_cast<int>(undirected_count.size());
  report.euler_characteristic = report.vertex_count + report.face_count - report.edge_count;
  if (report.euler_characteristic != 2)
    fail("Euler characteristic V+F-E = " + std::to_string(report.euler_characteristic) + ", expected 2");

  std::vector<std::vector<int>> adjacency(vertex_count);
  for (const auto& [key, count] : undirected_count) {
    adjacency[key.first].push_back(key.second);
    adjacency[key.second].push_back(key.first);
  }
  for (int v = 0; v < vertex_count; ++v)
    if (adjacency[v].size() < 3)
      fail("vertex " + std::to_string(v) + " has valence " + std::to_string(adjacency[v].size()));
  if (vertex_count > 0) {
    std::vector<bool> seen(vertex_count, false);
    std::queue<int> queue;
    queue.push(0);
    seen[0] = true;
    int reached = 1;
    while (!queue.empty()) {
      const int v = queue.front();
      queue.pop();
      for (int w : adjacency[v])
        if (!seen[w]) {
          seen[w] = true;
          ++reached;
          queue.push(w);
        }
    }
    if (reached != vertex_count) fail("edge graph is not connected");
  }
  return report;
}

/// Validated face-vertex incidence structure with derived edges and stars.
class CombinatorialType {
 public:
  static CombinatorialType from_faces(int vertex_count, std::vector<Face> faces) {
    const CombinatorialReport report = validate_combinatorics(vertex_count, faces);
    if (!report.ok) {
      std::string msg;
      for (const auto& v : report.violations) msg += (msg.empty() ? "" : "; ") + v;
      throw Error(ErrorKind::InvalidCombinatorics, msg);
    }
    CombinatorialType c;
    c.vertex_count_ = vertex_count;
    c.faces_ = std::move(faces);
    c.build();
    return c;
  }

  int vertex_count() const { return vertex_count_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  int face_count() const { return static_cast<int>(faces_.size()); }
  const std::vector<Face>& faces() const { return faces_; }
  const Face& face(int f) const { return faces_[f]; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(int e) const { return edges_[e]; }
  const VertexStar& star(int v) const { return stars_[v]; }
  int valence(int v) const { return static_cast<int>(stars_[v].edges.size()); }

  /// Index of the undirected edge {u, v}, or -1.
  int edge_index(int u, int v) const {
    const auto it = edge_lookup_.find(std::minmax(u, v));
    return it == edge_lookup_.end() ? -1 : it->second;
  }

  /// Face traversing u -> v, or -1.
  int face_of_directed(int u, int v) const {
    const auto it = directed_.find({u, v});
    return it == directed_.end() ? -1 : it->second;
  }

  /// Number of planarity conditions, sum over faces of (d_f - 3).
  int planarity_count() const {
    int n = 0;
    for (const Face& f : faces_) n += static_cast<int>(f.size()) - 3;
    return n;
  }

  /// The same combinatorics with vertex i renamed to perm[i].
  CombinatorialType relabeled(const std::vector<int>& perm) const {
    std::vector<Face> faces = faces_;
    for (Face& f : faces)
      for (int& v : f) v = perm[v];
    return from_faces(vertex_count_, std::move(faces));
  }

 private:
  void build() {
    for (int f = 0; f < face_count(); ++f) {
      const Face& face = faces_[f];
      for (std::size_t i = 0; i < face.size(); ++i)
        directed_[{face[i], face[(i + 1) % face.size()]}] = f;
    }
    for (const auto& [key, f] : directed_) {
      if (key.first > key.second) continue;
      Edge e;
      e.a = key.first;
      e.b = key.second;
      e.left_face = f;
      e.right_face = directed_.at({key.second, key.first});
      edges_.push_back(e);
    }
    // std::map iteration gives lexicographic order on (a, b).
    for (int i = 0; i < edge_count(); ++i) edge_lookup_[{edges_[i].a, edges_[i].b}] = i;

    stars_.resize(vertex_count_);
    for (int v = 0; v < vertex_count_; ++v) {
      int start = -1;
      for (int f = 0; f < face_count() && start < 0; ++f)
        if (std::find(faces_[f].begin(), faces_[f].end(), v) != faces_[f].end()) start = f;
      VertexStar& star = stars_[v];
      int f = start;
      do {
        const Face& face = faces_[f];
        const auto pos = std::find(face.begin(), face.end(), v) - face.begin();
        const int pred = face[(pos + face.size() - 1) % face.size()];
        star.faces.push_back(f);
        star.edges.push_back(edge_index(v, pred));
        star.neighbors.push_back(pred);
        f = directed_.at({v, pred});
      } while (f != start);
    }
  }

  int vertex_count_ = 0;
  std::vector<Face> faces_;
  std::vector<Edge> edges_;
  std::vector<VertexStar> stars_;
  std::map<std::pair<int, int>, int> edge_lookup_;
  std::map<std::pair<int, int>, int> directed_;
};

/// Marked polyhedron in the Klein ball. Construction does not validate; use
/// `validate_embedding` or `embed_euclidean` for checked instances.
struct EmbeddedPolyhedron {
  std::shared_ptr<const CombinatorialType> combinatorics;
  std::vector<Vec3> positions;

  EmbeddedPolyhedron() = default;
  EmbeddedPolyhedron(std::shared_ptr<const CombinatorialType> c, std::vector<Vec3> x)
      : combinatorics(std::move(c)), positions(std::move(x)) {}
  EmbeddedPolyhedron(const CombinatorialType& c, std::vector<Vec3> x)
      : combinatorics(std::make_shared<const CombinatorialType>(c)), positions(std::move(x)) {}

  const CombinatorialType& comb() const { return *combinatorics; }
  int vertex_count() const { return static_cast<int>(positions.size()); }
  KleinPoint point(int v) const { return KleinPoint(positions[v]); }

  /// Stacked coordinates (x_0, y_0, z_0, x_1, ...), length 3|V|.
  Eigen::VectorXd coordinates() const {
    Eigen::VectorXd x(3 * positions.size());
    for (std::size_t v = 0; v < positions.size(); ++v) x.segment<3>(3 * v) = positions[v];
    return x;
  }

  EmbeddedPolyhedron with_coordinates(const Eigen::VectorXd& x) const {
    std::vector<Vec3> p(positions.size());
    for (std::size_t v = 0; v < p.size(); ++v) p[v] = x.segment<3>(3 * v);
    return EmbeddedPolyhedron(combinatorics, std::move(p));
  }

  EmbeddedPolyhedron transformed(const Isometry& g, const Tolerances& tol = {}) const {
    std::vector<Vec3> p(positions.size());
    for (std::size_t v = 0; v < p.size(); ++v) p[v] = g.apply(point(static_cast<int>(v)), tol).p;
    return EmbeddedPolyhedron(combinatorics, std::move(p));
  }
};

using AngleVector = Eigen::VectorXd;

/// det(x2 - x1, x3 - x1, x - x1) for the three anchors (first three vertices)
/// of a face. Negative on the interior side for counterclockwise faces.
inline double face_determinant(const EmbeddedPolyhedron& p, int f, const Vec3& x) {
  const Face& face = p.comb().face(f);
  const Vec3& a = p.positions[face[0]];
  return (p.positions[face[1]] - a).cross(p.positions[face[2]] - a).dot(x - a);
}

/// One entry per (face, vertex beyond the three anchors), face order then
/// cyclic order.
inline Eigen::VectorXd planarity_residuals(const EmbeddedPolyhedron& p) {
  Eigen::VectorXd r(p.comb().planarity_count());
  int row = 0;
  for (int f = 0; f < p.comb().face_count(); ++f) {
    const Face& face = p.comb().face(f);
    for (std::size_t i = 3; i < face.size(); ++i) r(row++) = face_determinant(p, f, p.positions[face[i]]);
  }
  return r;
}

/// Strict-convexity determinants, one per (face, vertex off the face), face
/// order then ascending vertex index. Faces are stored counterclockwise from
/// outside, so the anchor determinant is negated to make convex data positive.
inline Eigen::VectorXd convexity_margins(const EmbeddedPolyhedron& p) {
  std::vector<double> m;
  for (int f = 0; f < p.comb().face_count(); ++f) {
    const Face& face = p.comb().face(f);
    for (int v = 0; v < p.vertex_count(); ++v)
      if (std::find(face.begin(), face.end(), v) == face.end())
        m.push_back(-face_determinant(p, f, p.positions[v]));
  }
  return Eigen::Map<Eigen::VectorXd>(m.data(), static_cast<Eigen::Index>(m.size()));
}

struct EmbeddingIssue {
  ErrorKind kind;
  std::string message;
};

struct EmbeddingReport {
  bool ok = true;
  double max_planarity_residual = 0.0;
  double min_convexity_margin = 0.0;
  double max_vertex_norm = 0.0;
  std::vector<EmbeddingIssue> issues;
};

inline EmbeddingReport validate_embedding(const EmbeddedPolyhedron& p, const Tolerances& tol = {}) {
  EmbeddingReport report;
  auto fail = [&report](ErrorKind k, std::string msg) {
    report.ok = false;
    report.issues.push_back({k, std::move(msg)});
  };
  if (p.vertex_count() != p.comb().vertex_count()) {
    fail(ErrorKind::InvalidCombinatorics, "position count does not match vertex count");
    return report;
  }
  for (int v = 0; v < p.vertex_count(); ++v) {
    const double n = p.positions[v].norm();
    report.max_vertex_norm = std::max(report.max_vertex_norm, n);
    if (!(n < 1.0 - tol.ball)) fail(ErrorKind::BallBoundary, "vertex " + std::to_string(v) + " outside the open ball");
  }
  for (int f = 0; f < p.comb().face_count(); ++f) {
    const Face& face = p.comb().face(f);
    const Vec3 u = p.positions[face[1]] - p.positions[face[0]];
    const Vec3 w = p.positions[face[2]] - p.positions[face[0]];
    if (u.cross(w).norm() <= tol.rank_degenerate * std::max(1e-300, u.norm() * w.norm()))
      fail(ErrorKind::DegenerateFace, "anchors of face " + std::to_string(f) + " are collinear");
  }
  const Eigen::VectorXd planar = planarity_residuals(p);
  if (planar.size()) report.max_planarity_residual = planar.cwiseAbs().maxCoeff();
  if (report.max_planarity_residual > tol.planar)
    fail(ErrorKind::PlanarityViolation,
         "max planarity residual " + std::to_string(report.max_planarity_residual));
  const Eigen::VectorXd margins = convexity_margins(p);
  report.min_convexity_margin = margins.size() ? margins.minCoeff() : 0.0;
  if (!(report.min_convexity_margin > tol.convex))
    fail(ErrorKind::ConvexityViolation, "min convexity margin " + std::to_string(report.min_convexity_margin));
  return report;
}

/// Throws the first issue of `validate_embedding`.
inline void require_valid_embedding(const EmbeddedPolyhedron& p, const Tolerances& tol = {}) {
  const EmbeddingReport r = validate_embedding(p, tol);
  if (!r.ok) throw Error(r.issues.front().kind, r.issues.front().message);
}

/// Klein planes are Euclidean planes, so a convex Euclidean polyhedron
/// scaled into the ball is a convex hyperbolic polyhedron.
inline EmbeddedPolyhedron embed_euclidean(const CombinatorialType& c, const std::vector<Vec3>& euclidean_positions,
                                          double scale, const Tolerances& tol = {}) {
  std::vector<Vec3> x(euclidean_positions.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = scale * euclidean_positions[i];
  EmbeddedPolyhedron p(c, std::move(x));
  require_valid_embedding(p, tol);
  return p;
}

/// Vertex centroid; must lie strictly inside every face half-space.
inline KleinPoint interior_point(const EmbeddedPolyhedron& p) {
  Vec3 c = Vec3::Zero();
  for (const Vec3& x : p.positions) c += x;
  c /= static_cast<double>(p.positions.size());
  for (int f = 0; f < p.comb().face_count(); ++f)
    if (!(face_determinant(p, f, c) < 0.0))
      throw Error(ErrorKind::ConvexityViolation, "centroid is not interior to face " + std::to_string(f));
  return KleinPoint(c);
}

/// Outward unit normals of the face planes (through the anchors).
inline std::vector<Plane> face_planes(const EmbeddedPolyhedron& p, const Tolerances& tol = {}) {
  const KleinPoint witness = interior_point(p);
  std::vector<Plane> planes;
  planes.reserve(p.comb().face_count());
  for (const Face& face : p.comb().faces())
    planes.push_back(plane_through(p.point(face[0]), p.point(face[1]), p.point(face[2]), witness, tol));
  return planes;
}

/// Interior angle between two faces with outward unit normals.
inline double dihedral_from_normals(const Plane& a, const Plane& b) {
  const double c = std::clamp(minkowski_inner(a.normal, b.normal), -1.0, 1.0);
  return std::numbers::pi - std::acos(c);
}

/// Interior dihedral angle at every edge, lexicographic edge order.
inline AngleVector dihedral_angles(const EmbeddedPolyhedron& p, const Tolerances& tol = {}) {
  const std::vector<Plane> planes = face_planes(p, tol);
  AngleVector angles(p.comb().edge_count());
  for (int e = 0; e < p.comb().edge_count(); ++e) {
    const Edge& edge = p.comb().edge(e);
    angles(e) = dihedral_from_normals(planes[edge.left_face], planes[edge.right_face]);
  }
  return angles;
}

}  // namespace stokerlab
