#pragma once

#include "common/math.hpp"

namespace hoi {

inline constexpr double kNearPlane = 0.01;
inline constexpr double kFarPlane = 10.0;
inline constexpr double kBehindCameraEpsilon = 1e-6;

// Pinhole camera. Image rows grow with camera-space y, columns with x.
struct Camera {
  double fx = 600.0;
  double fy = 600.0;
  double cx = 360.0;
  double cy = 240.0;
  int width = 720;
  int height = 480;
  RigidTransform world_to_camera;

  // Throws Schema on non-positive focal lengths or an off-image principal point.
  void validate() const;

  // The 480x720 camera the toy assets are framed for.
  static Camera toy_default() { return {}; }
};

struct Projection {
  double u = 0.0;
  double v = 0.0;
  double depth = 0.0;
};

// Throws BehindCamera when camera-space z <= 1e-6 m.
Projection project_point(const Camera& cam, const Vec3& world_point);

// Same, from a point already in camera space.
Projection project_camera_point(const Camera& cam, const Vec3& p);

}  // namespace hoi
