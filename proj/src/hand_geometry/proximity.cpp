#include "hand_geometry/proximity.hpp"

#include "common/error.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <utility>

namespace hoi {

bool is_watertight(const TriMesh& mesh) {
  if (mesh.faces.empty()) return false;
  std::map<std::pair<std::uint32_t, std::uint32_t>, int> edge_use;
  for (const auto& f : mesh.faces) {
    for (int e = 0; e < 3; ++e) {
      auto a = f[e];
      auto b = f[(e + 1) % 3];
      if (a > b) std::swap(a, b);
      ++edge_use[{a, b}];
    }
  }
  return std::all_of(edge_use.begin(), edge_use.end(), [](const auto& kv) { return kv.second == 2; });
}

// Ericson, Real-Time Collision Detection, 5.1.5.
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a;
  const Vec3 ac = c - a;
  const Vec3 ap = p - a;
  const double d1 = ab.dot(ap);
  const double d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;

  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp);
  const double d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + ab * (d1 / (d1 - d3));

  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp);
  const double d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + ac * (d2 / (d2 - d6));

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
  }

  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

std::optional<double> ray_triangle(const Vec3& origin, const Vec3& dir, const Vec3& a,
                                   const Vec3& b, const Vec3& c) {
  const Vec3 e1 = b - a;
  const Vec3 e2 = c - a;
  const Vec3 pvec = dir.cross(e2);
  const double det = e1.dot(pvec);
  if (det == 0.0) return std::nullopt;
  const double inv = 1.0 / det;
  const Vec3 tvec = origin - a;
  const double u = tvec.dot(pvec) * inv;
  if (u < 0.0 || u > 1.0) return std::nullopt;
  const Vec3 qvec = tvec.cross(e1);
  const double v = dir.dot(qvec) * inv;
  if (v < 0.0 || u + v > 1.0) return std::nullopt;
  const double t = e2.dot(qvec) * inv;
  if (t <= 0.0) return std::nullopt;
  return t;
}

Vec3 containment_ray_direction() { return Vec3(1.0, 0.5, 0.25).normalized(); }

bool contains_point(const TriMesh& m, const Vec3& p) {
  const Vec3 dir = containment_ray_direction();
  int crossings = 0;
  for (const auto& f : m.faces) {
    if (ray_triangle(p, dir, m.vertices[f[0]], m.vertices[f[1]], m.vertices[f[2]])) ++crossings;
  }
  return (crossings % 2) == 1;
}

namespace {

double unsigned_distance(const TriMesh& m, const Vec3& p) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& f : m.faces) {
    const Vec3 q = closest_point_on_triangle(p, m.vertices[f[0]], m.vertices[f[1]], m.vertices[f[2]]);
    best = std::min(best, (q - p).squaredNorm());
  }
  return std::sqrt(best);
}

}  // namespace

double signed_distance(const TriMesh& m, const Vec3& p) {
  const double d = unsigned_distance(m, p);
  return contains_point(m, p) ? -d : d;
}

double penetration_depth(const TriMesh& hand_mesh, const TriMesh& object_mesh) {
  if (!is_watertight(object_mesh)) {
    fail(ErrorCode::NonWatertight, "object mesh is not watertight (some edge is not shared by exactly two faces)");
  }
  const auto object_box = object_mesh.bounds();
  if (!object_box.intersects(hand_mesh.bounds())) return 0.0;

  double deepest = 0.0;
  for (const auto& v : hand_mesh.vertices) {
    if (!object_box.contains(v)) continue;
    if (!contains_point(object_mesh, v)) continue;
    deepest = std::max(deepest, unsigned_distance(object_mesh, v));
  }
  return deepest;
}

}  // namespace hoi
