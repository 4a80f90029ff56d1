#include "raster/tracklets.hpp"

#include "common/error.hpp"
#include "common/parallel.hpp"
#include "common/rng.hpp"
#include "raster/rasterizer.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

namespace hoi {

using nlohmann::json;

namespace {

// Order meshes by content so that the sampling does not depend on how
// equal-id instances happen to be listed.
std::vector<std::size_t> canonical_order(const std::vector<TriMesh>& meshes) {
  std::vector<std::size_t> order(meshes.size());
  std::iota(order.begin(), order.end(), 0);
  auto key_less = [&](std::size_t ia, std::size_t ib) {
    const TriMesh& a = meshes[ia];
    const TriMesh& b = meshes[ib];
    if (a.instance_id != b.instance_id) return a.instance_id < b.instance_id;
    if (a.vertices.size() != b.vertices.size()) return a.vertices.size() < b.vertices.size();
    if (a.faces.size() != b.faces.size()) return a.faces.size() < b.faces.size();
    for (std::size_t v = 0; v < a.vertices.size(); ++v) {
      for (int c = 0; c < 3; ++c) {
        if (a.vertices[v][c] != b.vertices[v][c]) return a.vertices[v][c] < b.vertices[v][c];
      }
    }
    return a.faces < b.faces;
  };
  std::stable_sort(order.begin(), order.end(), key_less);
  return order;
}

struct SurfaceSample {
  std::size_t mesh;  // index into the frame's mesh list
  std::size_t face;
  Vec3 bary;
};

}  // namespace

std::vector<Tracklet> generate_tracklets(const MeshSequence& frames, const std::vector<DepthMap>& depth,
                                         const Camera& cam, int n, std::uint64_t seed) {
  if (frames.empty()) fail(ErrorCode::Shape, "tracklets need at least one frame");
  if (depth.size() != frames.size()) fail(ErrorCode::Shape, "one depth map per frame required");
  if (n < 0) fail(ErrorCode::InvalidArgument, "tracklet count must be >= 0");
  const auto& first = frames.front();
  for (const auto& f : frames) {
    if (f.size() != first.size()) fail(ErrorCode::Shape, "frames list different numbers of meshes");
    for (std::size_t m = 0; m < f.size(); ++m) {
      if (f[m].faces != first[m].faces || f[m].vertices.size() != first[m].vertices.size()) {
        fail(ErrorCode::Shape, "mesh topology changes across frames");
      }
    }
  }
  const bool any_foreground = std::any_of(depth.front().data.begin(), depth.front().data.end(),
                                          [](float d) { return d > 0.0f; });
  if (!any_foreground) fail(ErrorCode::NoForeground, "frame 0 renders no foreground");

  // Cumulative triangle areas over the canonical mesh order.
  std::vector<std::pair<std::size_t, std::size_t>> tri_ref;
  std::vector<double> cumulative;
  double total = 0.0;
  for (std::size_t m : canonical_order(first)) {
    const TriMesh& mesh = first[m];
    for (std::size_t t = 0; t < mesh.faces.size(); ++t) {
      const auto& f = mesh.faces[t];
      const double a = 0.5 * (mesh.vertices[f[1]] - mesh.vertices[f[0]])
                                 .cross(mesh.vertices[f[2]] - mesh.vertices[f[0]])
                                 .norm();
      if (!(a > 0.0)) continue;
      total += a;
      tri_ref.emplace_back(m, t);
      cumulative.push_back(total);
    }
  }
  if (tri_ref.empty()) fail(ErrorCode::NoForeground, "scene has no surface area to sample");

  Rng rng(seed);
  std::vector<SurfaceSample> samples;
  samples.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double pick = rng.uniform() * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), pick);
    if (it == cumulative.end()) --it;
    const auto [m, t] = tri_ref[static_cast<std::size_t>(it - cumulative.begin())];
    const double r1 = std::sqrt(rng.uniform());
    const double r2 = rng.uniform();
    samples.push_back({m, t, Vec3(1.0 - r1, r1 * (1.0 - r2), r1 * r2)});
  }

  std::vector<Tracklet> tracks(n);
  for (int i = 0; i < n; ++i) {
    Tracklet& tr = tracks[i];
    const auto& s = samples[i];
    tr.points.resize(frames.size());
    tr.visible.resize(frames.size());
    Vec2 last(0.0, 0.0);
    for (std::size_t fi = 0; fi < frames.size(); ++fi) {
      const TriMesh& mesh = frames[fi][s.mesh];
      const auto& f = mesh.faces[s.face];
      const Vec3 p = s.bary[0] * mesh.vertices[f[0]] + s.bary[1] * mesh.vertices[f[1]] +
                     s.bary[2] * mesh.vertices[f[2]];
      const Vec3 pc = cam.world_to_camera.apply(p);
      bool vis = false;
      if (pc.z() > kBehindCameraEpsilon) {
        const auto proj = project_camera_point(cam, pc);
        last = Vec2(proj.u, proj.v);
        const double col = std::floor(proj.u);
        const double row = std::floor(proj.v);
        if (col >= 0 && row >= 0 && col < cam.width && row < cam.height) {
          const float d = depth[fi].at(static_cast<int>(row), static_cast<int>(col));
          vis = d > 0.0f && std::abs(static_cast<double>(d) - proj.depth) <= kVisibilityToleranceM;
        }
      }
      tr.points[fi] = last;
      tr.visible[fi] = vis;
    }
  }
  return tracks;
}

std::vector<Tracklet> generate_tracklets(const MeshSequence& frames, const Camera& cam, int n,
                                         std::uint64_t seed, int jobs) {
  std::vector<DepthMap> depth(frames.size());
  parallel_for(frames.size(), jobs, [&](std::size_t i) { depth[i] = rasterize(frames[i], cam).depth; });
  return generate_tracklets(frames, depth, cam, n, seed);
}

json tracklets_to_json(const std::vector<Tracklet>& tracks) {
  json arr = json::array();
  for (const auto& t : tracks) {
    json xy = json::array();
    for (const auto& p : t.points) xy.push_back({p.x(), p.y()});
    json vis = json::array();
    for (bool v : t.visible) vis.push_back(v);
    arr.push_back({{"xy", xy}, {"vis", vis}});
  }
  const std::size_t frames = tracks.empty() ? 0 : tracks.front().size();
  return {{"n", tracks.size()}, {"frames", frames}, {"tracks", arr}};
}

std::vector<Tracklet> tracklets_from_json(const json& j) {
  try {
    const auto n = j.at("n").get<std::size_t>();
    const auto frames = j.at("frames").get<std::size_t>();
    const auto& arr = j.at("tracks");
    if (arr.size() != n) fail(ErrorCode::Schema, "tracklets: n does not match the track count");
    std::vector<Tracklet> out;
    for (const auto& t : arr) {
      Tracklet tr;
      for (const auto& p : t.at("xy")) {
        if (p.size() != 2) fail(ErrorCode::Schema, "tracklets: xy entries are [u, v]");
        tr.points.emplace_back(p[0].get<double>(), p[1].get<double>());
        if (!tr.points.back().allFinite()) fail(ErrorCode::Schema, "tracklets: non-finite position");
      }
      if (t.contains("vis")) {
        for (const auto& v : t.at("vis")) tr.visible.push_back(v.get<bool>());
      } else {
        tr.visible.assign(tr.points.size(), true);
      }
      if (tr.points.size() != frames || tr.visible.size() != frames) {
        fail(ErrorCode::Schema, "tracklets: every track must have `frames` entries");
      }
      out.push_back(std::move(tr));
    }
    return out;
  } catch (const json::exception& e) {
    fail(ErrorCode::Schema, std::string("tracklets: ") + e.what());
  }
}

void save_tracklets(const std::vector<Tracklet>& tracks, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::Io, "cannot write '" + path + "'");
  out << tracklets_to_json(tracks).dump() << '\n';
}

std::vector<Tracklet> load_tracklets(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open tracklets '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail(ErrorCode::Schema, path + ": " + e.what());
  }
  return tracklets_from_json(j);
}

}  // namespace hoi
