#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "stokerlab/polyhedron.hpp"

namespace stokerlab::fixtures {

/// Convex Euclidean seed with circumradius-style normalization: the farthest
/// vertex has norm 1, so `at_scale(s)` keeps every vertex within norm s.
struct Fixture {
  std::string name;
  CombinatorialType combinatorics;
  std::vector<Vec3> seed;

  EmbeddedPolyhedron at_scale(double scale, const Tolerances& tol = {}) const {
    return embed_euclidean(combinatorics, seed, scale, tol);
  }
};

namespace detail {

inline std::vector<Vec3> normalized(std::vector<Vec3> pts) {
  double r = 0.0;
  for (const Vec3& p : pts) r = std::max(r, p.norm());
  for (Vec3& p : pts) p /= r;
  return pts;
}

}  // namespace detail

inline Fixture tetrahedron() {
  return {"tetrahedron",
          CombinatorialType::from_faces(4, {{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}}),
          detail::normalized({{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}})};
}

inline Fixture cube() {
  // Vertex i has coordinates (+-1, +-1, +-1) with bits (x, y, z) = (4, 2, 1).
  std::vector<Vec3> pts;
  for (int i = 0; i < 8; ++i) pts.emplace_back(i & 4 ? 1.0 : -1.0, i & 2 ? 1.0 : -1.0, i & 1 ? 1.0 : -1.0);
  return {"cube",
          CombinatorialType::from_faces(
              8, {{0, 1, 3, 2}, {4, 6, 7, 5}, {0, 4, 5, 1}, {2, 3, 7, 6}, {0, 2, 6, 4}, {1, 5, 7, 3}}),
          detail::normalized(std::move(pts))};
}

inline Fixture triangular_prism() {
  std::vector<Vec3> pts;
  for (int level = 0; level < 2; ++level)
    for (int k = 0; k < 3; ++k) {
      const double t = std::numbers::pi / 2 + 2.0 * std::numbers::pi * k / 3.0;
      pts.emplace_back(std::cos(t), std::sin(t), level ? 0.8 : -0.8);
    }
  return {"prism",
          CombinatorialType::from_faces(
              6, {{0, 2, 1}, {3, 4, 5}, {0, 1, 4, 3}, {1, 2, 5, 4}, {2, 0, 3, 5}}),
          detail::normalized(std::move(pts))};
}

inline Fixture pentagonal_pyramid() {
  std::vector<Vec3> pts;
  for (int k = 0; k < 5; ++k) {
    const double t = 2.0 * std::numbers::pi * k / 5.0;
    pts.emplace_back(std::cos(t), std::sin(t), -0.4);
  }
  pts.emplace_back(0.0, 0.0, 1.0);
  std::vector<Face> faces = {{4, 3, 2, 1, 0}};
  for (int k = 0; k < 5; ++k) faces.push_back({k, (k + 1) % 5, 5});
  return {"pentagonal_pyramid", CombinatorialType::from_faces(6, std::move(faces)),
          detail::normalized(std::move(pts))};
}

inline Fixture octahedron() {
  // Vertices +x, -x, +y, -y, +z, -z; every vertex has valence 4.
  std::vector<Vec3> pts = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  std::vector<Face> faces;
  for (int sx = 0; sx < 2; ++sx)
    for (int sy = 0; sy < 2; ++sy)
      for (int sz = 0; sz < 2; ++sz) {
        const int x = sx, y = 2 + sy, z = 4 + sz;
        if ((sx + sy + sz) % 2 == 0) faces.push_back({x, y, z});
        else faces.push_back({x, z, y});
      }
  return {"octahedron", CombinatorialType::from_faces(6, std::move(faces)), detail::normalized(std::move(pts))};
}

inline std::vector<Fixture> all() {
  return {tetrahedron(), triangular_prism(), cube(), pentagonal_pyramid(), octahedron()};
}

inline Fixture by_name(const std::string& name) {
  for (Fixture& f : all())
    if (f.name == name) return f;
  throw Error(ErrorKind::IoError, "unknown fixture '" + name + "'");
}

}  // namespace stokerlab::fixtures
