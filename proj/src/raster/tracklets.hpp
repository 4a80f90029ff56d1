#pragma once

#include "hand_geometry/mesh.hpp"
#include "raster/camera.hpp"
#include "raster/image.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace hoi {

// A tracked 2-D point: pixel position and visibility per frame.
struct Tracklet {
  std::vector<Vec2> points;
  std::vector<bool> visible;

  std::size_t size() const { return points.size(); }
};

inline constexpr double kVisibilityToleranceM = 1e-3;

// Scene meshes per frame; every frame lists the same meshes with the same
// topology, only vertex positions change.
using MeshSequence = std::vector<std::vector<TriMesh>>;

// Samples n surface points on frame 0 (area weighted, seeded), keeps each
// attached barycentrically to its triangle, and re-projects it every frame.
// A point is visible when its depth is within 1 mm of the depth map at its
// pixel. Points behind the camera keep their last position, flagged hidden.
// Throws NoForeground when frame 0 renders empty.
std::vector<Tracklet> generate_tracklets(const MeshSequence& frames, const Camera& cam, int n,
                                         std::uint64_t seed, int jobs = 1);

// Same, with depth maps already rendered for every frame.
std::vector<Tracklet> generate_tracklets(const MeshSequence& frames, const std::vector<DepthMap>& depth,
                                         const Camera& cam, int n, std::uint64_t seed);

// {"n", "frames", "tracks": [{"xy": [[u, v]...], "vis": [bool...]}]}
nlohmann::json tracklets_to_json(const std::vector<Tracklet>& tracks);
std::vector<Tracklet> tracklets_from_json(const nlohmann::json& j);
void save_tracklets(const std::vector<Tracklet>& tracks, const std::string& path);
std::vector<Tracklet> load_tracklets(const std::string& path);

}  // namespace hoi
