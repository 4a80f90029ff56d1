#pragma once

#include "common/math.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace hoi {

using Face = std::array<std::uint32_t, 3>;

// Triangle mesh in meters. instance_id is the segmentation label the mesh
// renders with (1 = hand, 2+ = objects).
struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;
  int instance_id = 0;

  std::size_t vertex_count() const { return vertices.size(); }
  std::size_t face_count() const { return faces.size(); }

  Eigen::AlignedBox3d bounds() const;
  double area() const;
};

// Throws Schema on out-of-range indices or zero-area faces.
void validate_mesh(const TriMesh& mesh);

// Wavefront OBJ: only `v` and `f` records are read. Polygons are fan
// triangulated, negative indices are relative to the current vertex count.
TriMesh load_obj(const std::string& path, int instance_id);
TriMesh parse_obj(std::istream& in, int instance_id, const std::string& source = "<stream>");
void save_obj(const TriMesh& mesh, const std::string& path);

// 6-DoF pose: axis-angle rotation (radians) then translation (meters).
struct ObjectPose {
  Vec3 rotation = Vec3::Zero();
  Vec3 translation = Vec3::Zero();

  RigidTransform transform() const {
    return {axis_angle_to_matrix(rotation), translation};
  }
  bool operator==(const ObjectPose& o) const {
    return rotation == o.rotation && translation == o.translation;
  }
};

TriMesh apply_object_pose(const TriMesh& mesh, const ObjectPose& pose);
TriMesh apply_transform(const TriMesh& mesh, const RigidTransform& g);

// Axis-aligned box [-h, h] centered at the origin, 12 outward-wound triangles.
TriMesh make_box(const Vec3& half_extents, int instance_id);

}  // namespace hoi
