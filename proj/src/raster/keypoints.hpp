#pragma once

#include "hand_geometry/hand_model.hpp"
#include "raster/camera.hpp"
#include "raster/image.hpp"

#include <array>

namespace hoi {

// Drawing style at 480x720; both scale with min(H, W) / 480.
inline constexpr double kBoneWidthPx = 3.0;
inline constexpr double kJointRadiusPx = 4.0;

// Wrist white; one hue per finger (thumb red, index yellow, middle green,
// ring blue, pinky magenta).
Rgb keypoint_color(int keypoint);

// Lights every pixel whose center lies within `half_width` of segment ab.
void draw_segment(KeypointImage& img, const Vec2& a, const Vec2& b, double half_width, const Rgb& color);
// Lights every pixel whose center lies within `radius` of c.
void draw_disc(KeypointImage& img, const Vec2& c, double radius, const Rgb& color);

// Bones first, then joint discs on top, both in keypoint order. Joints behind
// the camera are skipped along with their incident bones.
KeypointImage render_keypoints(const std::array<Vec3, kKeypointCount>& joints, const Camera& cam);

}  // namespace hoi
