#pragma once

#include "hand_geometry/mesh.hpp"

#include <optional>

namespace hoi {

// Every undirected edge shared by exactly two faces.
bool is_watertight(const TriMesh& mesh);

// Closest point on triangle (a, b, c) to p.
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

// Ray parameter of the hit, if the ray origin + t*dir (t > 0) crosses the
// triangle. Moller-Trumbore without culling.
std::optional<double> ray_triangle(const Vec3& origin, const Vec3& dir, const Vec3& a,
                                   const Vec3& b, const Vec3& c);

// Fixed ray used for parity containment, chosen off every axis.
Vec3 containment_ray_direction();

bool contains_point(const TriMesh& closed_mesh, const Vec3& p);

// Negative inside. Magnitude is the distance to the nearest triangle.
double signed_distance(const TriMesh& closed_mesh, const Vec3& p);

// Deepest hand vertex inside the object, meters, >= 0. Throws NonWatertight.
double penetration_depth(const TriMesh& hand_mesh, const TriMesh& object_mesh);

}  // namespace hoi
