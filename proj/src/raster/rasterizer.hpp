#pragma once

#include "hand_geometry/mesh.hpp"
#include "raster/camera.hpp"
#include "raster/image.hpp"

#include <span>

namespace hoi {

struct RasterResult {
  DepthMap depth;  // camera-space z of the nearest surface
  SegMap seg;      // instance_id of the nearest surface
};

// Z-buffered, no culling, no anti-aliasing. Pixel (row i, col j) samples the
// image point (j + 0.5, i + 0.5). Depth is interpolated perspective-correctly
// (linear in 1/z). Triangles are clipped at the near plane; fragments beyond
// the far plane are dropped. Equal depths resolve to the lower instance id,
// then the lower triangle index.
RasterResult rasterize(std::span<const TriMesh> meshes, const Camera& cam);

}  // namespace hoi
