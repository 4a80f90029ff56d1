#include "raster/keypoints.hpp"

#include "common/error.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace hoi {

Rgb keypoint_color(int keypoint) {
  static constexpr std::array<Rgb, kFingerCount> finger_colors{{
      {255, 0, 0},
      {255, 255, 0},
      {0, 255, 0},
      {0, 128, 255},
      {255, 0, 255},
  }};
  if (keypoint <= 0) return {255, 255, 255};
  return finger_colors[(keypoint - 1) / 4];
}

namespace {

void put(KeypointImage& img, int row, int col, const Rgb& color) {
  for (int c = 0; c < 3; ++c) img.at(row, col, c) = color[c];
}

double segment_distance_sq(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len_sq = ab.squaredNorm();
  double t = len_sq > 0.0 ? (p - a).dot(ab) / len_sq : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (a + t * ab - p).squaredNorm();
}

}  // namespace

void draw_segment(KeypointImage& img, const Vec2& a, const Vec2& b, double half_width, const Rgb& color) {
  auto clamp_index = [](double x, int hi) {
    return static_cast<int>(std::clamp(x, -1.0, static_cast<double>(hi)));
  };
  const int col0 = std::max(0, clamp_index(std::floor(std::min(a.x(), b.x()) - half_width - 1), img.width));
  const int col1 = std::min(img.width - 1, clamp_index(std::ceil(std::max(a.x(), b.x()) + half_width), img.width));
  const int row0 = std::max(0, clamp_index(std::floor(std::min(a.y(), b.y()) - half_width - 1), img.height));
  const int row1 = std::min(img.height - 1, clamp_index(std::ceil(std::max(a.y(), b.y()) + half_width), img.height));
  const double limit = half_width * half_width;
  for (int row = row0; row <= row1; ++row) {
    for (int col = col0; col <= col1; ++col) {
      if (segment_distance_sq(Vec2(col + 0.5, row + 0.5), a, b) <= limit) put(img, row, col, color);
    }
  }
}

void draw_disc(KeypointImage& img, const Vec2& c, double radius, const Rgb& color) {
  draw_segment(img, c, c, radius, color);
}

KeypointImage render_keypoints(const std::array<Vec3, kKeypointCount>& joints, const Camera& cam) {
  cam.validate();
  KeypointImage img(cam.width, cam.height, 3, 0);
  const double scale = std::min(cam.width, cam.height) / 480.0;

  std::array<std::optional<Vec2>, kKeypointCount> uv;
  for (int k = 0; k < kKeypointCount; ++k) {
    if (!joints[k].allFinite()) fail(ErrorCode::InvalidArgument, "non-finite joint position");
    try {
      const auto p = project_point(cam, joints[k]);
      uv[k] = Vec2(p.u, p.v);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::BehindCamera) throw;
    }
  }

  const auto parents = canonical_parents();
  for (int k = 1; k < kKeypointCount; ++k) {
    const int p = parents[k];
    if (uv[k] && uv[p]) draw_segment(img, *uv[p], *uv[k], 0.5 * kBoneWidthPx * scale, keypoint_color(k));
  }
  for (int k = 0; k < kKeypointCount; ++k) {
    if (uv[k]) draw_disc(img, *uv[k], kJointRadiusPx * scale, keypoint_color(k));
  }
  return img;
}

}  // namespace hoi
