#include "raster/camera.hpp"

#include "common/error.hpp"

namespace hoi {

void Camera::validate() const {
  if (!(fx > 0.0 && fy > 0.0)) fail(ErrorCode::Schema, "camera focal lengths must be > 0");
  if (width <= 0 || height <= 0) fail(ErrorCode::Schema, "camera size must be positive");
  if (!(cx >= 0.0 && cx < width && cy >= 0.0 && cy < height)) {
    fail(ErrorCode::Schema, "camera principal point must lie inside the image");
  }
}

Projection project_camera_point(const Camera& cam, const Vec3& p) {
  if (!(p.z() > kBehindCameraEpsilon)) fail(ErrorCode::BehindCamera, "point is behind the camera");
  return {cam.fx * p.x() / p.z() + cam.cx, cam.fy * p.y() / p.z() + cam.cy, p.z()};
}

Projection project_point(const Camera& cam, const Vec3& world_point) {
  return project_camera_point(cam, cam.world_to_camera.apply(world_point));
}

}  // namespace hoi
