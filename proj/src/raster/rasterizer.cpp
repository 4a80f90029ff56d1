#include "raster/rasterizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace hoi {

namespace {

struct Fragment {
  double depth = std::numeric_limits<double>::infinity();
  int instance = std::numeric_limits<int>::max();
  std::size_t triangle = std::numeric_limits<std::size_t>::max();
};

bool closer(double depth, int instance, std::size_t tri, const Fragment& f) {
  if (depth != f.depth) return depth < f.depth;
  if (instance != f.instance) return instance < f.instance;
  return tri < f.triangle;
}

// Sutherland-Hodgman against z >= near, in camera space.
std::vector<Vec3> clip_near(const std::array<Vec3, 3>& tri) {
  std::vector<Vec3> out;
  out.reserve(4);
  for (int i = 0; i < 3; ++i) {
    const Vec3& a = tri[i];
    const Vec3& b = tri[(i + 1) % 3];
    const bool a_in = a.z() >= kNearPlane;
    const bool b_in = b.z() >= kNearPlane;
    if (a_in) out.push_back(a);
    if (a_in != b_in) {
      const double t = (kNearPlane - a.z()) / (b.z() - a.z());
      Vec3 p = a + t * (b - a);
      p.z() = kNearPlane;
      out.push_back(p);
    }
  }
  return out;
}

struct ScreenVertex {
  double x, y, inv_z;
};

void raster_triangle(const ScreenVertex& a, const ScreenVertex& b, const ScreenVertex& c,
                     int instance, std::size_t tri, int width, int height,
                     std::vector<Fragment>& buffer) {
  const double area = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
  if (area == 0.0 || !std::isfinite(area)) return;

  const double min_x = std::min({a.x, b.x, c.x});
  const double max_x = std::max({a.x, b.x, c.x});
  const double min_y = std::min({a.y, b.y, c.y});
  const double max_y = std::max({a.y, b.y, c.y});
  auto clamp_index = [](double x, int hi) {
    return static_cast<int>(std::clamp(x, -1.0, static_cast<double>(hi)));
  };
  const int col0 = std::max(0, clamp_index(std::floor(min_x - 0.5), width));
  const int col1 = std::min(width - 1, clamp_index(std::ceil(max_x - 0.5), width));
  const int row0 = std::max(0, clamp_index(std::floor(min_y - 0.5), height));
  const int row1 = std::min(height - 1, clamp_index(std::ceil(max_y - 0.5), height));
  if (col0 > col1 || row0 > row1) return;

  const double inv_area = 1.0 / area;
  for (int row = row0; row <= row1; ++row) {
    const double py = row + 0.5;
    for (int col = col0; col <= col1; ++col) {
      const double px = col + 0.5;
      const double w0 = ((b.x - px) * (c.y - py) - (b.y - py) * (c.x - px)) * inv_area;
      const double w1 = ((c.x - px) * (a.y - py) - (c.y - py) * (a.x - px)) * inv_area;
      const double w2 = ((a.x - px) * (b.y - py) - (a.y - py) * (b.x - px)) * inv_area;
      if (w0 < 0.0 || w1 < 0.0 || w2 < 0.0) continue;
      const double inv_z = w0 * a.inv_z + w1 * b.inv_z + w2 * c.inv_z;
      if (!(inv_z > 0.0)) continue;
      const double z = 1.0 / inv_z;
      if (z > kFarPlane) continue;
      Fragment& f = buffer[static_cast<std::size_t>(row) * width + col];
      if (closer(z, instance, tri, f)) f = {z, instance, tri};
    }
  }
}

}  // namespace

RasterResult rasterize(std::span<const TriMesh> meshes, const Camera& cam) {
  cam.validate();
  const int w = cam.width;
  const int h = cam.height;
  std::vector<Fragment> buffer(static_cast<std::size_t>(w) * h);

  std::vector<Vec3> cam_space;
  for (const auto& mesh : meshes) {
    cam_space.resize(mesh.vertices.size());
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
      cam_space[i] = cam.world_to_camera.apply(mesh.vertices[i]);
    }
    for (std::size_t t = 0; t < mesh.faces.size(); ++t) {
      const auto& f = mesh.faces[t];
      const std::array<Vec3, 3> tri{cam_space[f[0]], cam_space[f[1]], cam_space[f[2]]};
      if (tri[0].z() < kNearPlane && tri[1].z() < kNearPlane && tri[2].z() < kNearPlane) continue;

      std::vector<Vec3> poly;
      if (tri[0].z() >= kNearPlane && tri[1].z() >= kNearPlane && tri[2].z() >= kNearPlane) {
        poly.assign(tri.begin(), tri.end());
      } else {
        poly = clip_near(tri);
      }
      if (poly.size() < 3) continue;

      std::vector<ScreenVertex> sv(poly.size());
      for (std::size_t k = 0; k < poly.size(); ++k) {
        const Vec3& p = poly[k];
        sv[k] = {cam.fx * p.x() / p.z() + cam.cx, cam.fy * p.y() / p.z() + cam.cy, 1.0 / p.z()};
      }
      for (std::size_t k = 1; k + 1 < sv.size(); ++k) {
        raster_triangle(sv[0], sv[k], sv[k + 1], mesh.instance_id, t, w, h, buffer);
      }
    }
  }

  RasterResult out{DepthMap(w, h, 1, 0.0f), SegMap(w, h, 1, 0)};
  for (std::size_t i = 0; i < buffer.size(); ++i) {
    if (std::isfinite(buffer[i].depth)) {
      out.depth.data[i] = static_cast<float>(buffer[i].depth);
      out.seg.data[i] = static_cast<std::uint8_t>(std::clamp(buffer[i].instance, 0, 255));
    }
  }
  return out;
}

}  // namespace hoi
