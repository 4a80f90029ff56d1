#include "doctest.h"

#include "../support/oracles.hpp"
#include "common/error.hpp"
#include "hand_geometry/hand_model.hpp"
#include "raster/camera.hpp"
#include "raster/image_io.hpp"
#include "raster/keypoints.hpp"
#include "raster/rasterizer.hpp"
#include "raster/tracklets.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <random>

using namespace hoi;

namespace {

Camera small_camera() {
  Camera c;
  c.fx = c.fy = 100.0;
  c.cx = c.cy = 32.0;
  c.width = c.height = 64;
  return c;
}

TriMesh quad(double x0, double x1, double y0, double y1, double z, int id) {
  TriMesh m;
  m.vertices = {Vec3(x0, y0, z), Vec3(x1, y0, z), Vec3(x1, y1, z), Vec3(x0, y1, z)};
  m.faces = {Face{0, 1, 2}, Face{0, 2, 3}};
  m.instance_id = id;
  return m;
}

std::string temp_path(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "hoi_unit_raster";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

std::array<Vec3, kKeypointCount> hidden_joints() {
  std::array<Vec3, kKeypointCount> j;
  j.fill(Vec3(0, 0, -1));
  return j;
}

}  // namespace

TEST_CASE("projection analytic cases and the 3x4 oracle") {
  Camera cam;
  const auto p = project_point(cam, Vec3(0, 0, 1));
  CHECK(p.u == cam.cx);
  CHECK(p.v == cam.cy);
  CHECK(p.depth == 1.0);
  cam.fx = 500;
  CHECK(project_point(cam, Vec3(0.1, 0, 1)).u == doctest::Approx(cam.cx + 50).epsilon(1e-15));
  CHECK_THROWS_AS(project_point(cam, Vec3(0, 0, 0)), Error);
  CHECK_THROWS_AS(project_point(cam, Vec3(0, 0, -1)), Error);

  std::mt19937_64 g(7);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 100; ++i) {
    Camera c;
    c.fx = 400 + 200 * std::abs(u(g));
    c.fy = 400 + 200 * std::abs(u(g));
    c.world_to_camera.rotation = oracle::random_rotation(g);
    c.world_to_camera.translation = Vec3(u(g), u(g), 3.0);
    const Vec3 x(u(g), u(g), u(g));
    const auto ref = oracle::project(c.fx, c.fy, c.cx, c.cy, c.world_to_camera.rotation,
                                     c.world_to_camera.translation, x);
    const auto got = project_point(c, x);
    CHECK(std::abs(got.u - ref.x()) < 1e-9);
    CHECK(std::abs(got.v - ref.y()) < 1e-9);
    CHECK(std::abs(got.depth - ref.z()) < 1e-12);
  }
}

TEST_CASE("camera validation") {
  Camera c;
  CHECK_NOTHROW(c.validate());
  c.fx = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = Camera{};
  c.cx = 720;
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("empty scene renders all background") {
  const auto r = rasterize({}, small_camera());
  CHECK(r.depth.width == 64);
  CHECK(std::all_of(r.depth.data.begin(), r.depth.data.end(), [](float d) { return d == 0.0f; }));
  CHECK(std::all_of(r.seg.data.begin(), r.seg.data.end(), [](auto l) { return l == 0; }));
}

TEST_CASE("camera-facing square at 2 m covers the expected pixel rectangle") {
  const std::vector<TriMesh> scene{quad(-0.3, 0.3, -0.2, 0.4, 2.0, 5)};
  const auto r = rasterize(scene, small_camera());
  // u spans [17, 47], v spans [22, 52]; pixel centers inside are cols 17..46, rows 22..51.
  for (int row = 0; row < 64; ++row) {
    for (int col = 0; col < 64; ++col) {
      const bool inside = col >= 17 && col <= 46 && row >= 22 && row <= 51;
      CHECK(r.seg.at(row, col) == (inside ? 5 : 0));
      if (inside) {
        CHECK(r.depth.at(row, col) == doctest::Approx(2.0).epsilon(1e-7));
      } else {
        CHECK(r.depth.at(row, col) == 0.0f);
      }
    }
  }
}

TEST_CASE("nearer surface wins; segmentation is nonzero exactly where depth is") {
  const std::vector<TriMesh> scene{quad(-0.3, 0.3, -0.3, 0.3, 2.0, 2), quad(-0.1, 0.5, -0.1, 0.5, 1.5, 3)};
  const auto r = rasterize(scene, small_camera());
  CHECK(r.seg.at(40, 40) == 3);
  CHECK(r.depth.at(40, 40) == doctest::Approx(1.5).epsilon(1e-7));
  CHECK(r.seg.at(20, 20) == 2);
  for (std::size_t i = 0; i < r.seg.data.size(); ++i) CHECK((r.seg.data[i] != 0) == (r.depth.data[i] != 0.0f));
}

TEST_CASE("random triangle pairs agree with the per-pixel ray-cast oracle") {
  std::mt19937_64 g(9);
  std::uniform_real_distribution<double> u(-0.6, 0.6), z(0.8, 3.0);
  const Camera cam = small_camera();
  for (int scene_i = 0; scene_i < 25; ++scene_i) {
    std::vector<TriMesh> meshes;
    std::vector<oracle::Tri> tris;
    std::vector<int> ids;
    for (int t = 0; t < 2; ++t) {
      TriMesh m;
      for (int k = 0; k < 3; ++k) {
        const double d = z(g);
        m.vertices.emplace_back(u(g) * d, u(g) * d, d);
      }
      m.faces = {Face{0, 1, 2}};
      m.instance_id = 2 + t;
      tris.push_back({m.vertices[0], m.vertices[1], m.vertices[2]});
      ids.push_back(m.instance_id);
      meshes.push_back(m);
    }
    const auto r = rasterize(meshes, cam);
    std::vector<std::array<oracle::V2, 2>> edges;
    for (const auto& t : tris) {
      const std::array<Vec3, 3> v{t.a, t.b, t.c};
      for (int e = 0; e < 3; ++e) {
        const auto p = project_camera_point(cam, v[e]);
        const auto q = project_camera_point(cam, v[(e + 1) % 3]);
        edges.push_back({oracle::V2(p.u, p.v), oracle::V2(q.u, q.v)});
      }
    }
    for (int row = 0; row < 64; ++row) {
      for (int col = 0; col < 64; ++col) {
        const oracle::V2 c(col + 0.5, row + 0.5);
        bool near_edge = false;
        for (const auto& e : edges) near_edge |= oracle::point_segment_2d(c, e[0], e[1]) <= 0.5;
        if (near_edge) continue;
        const auto hit = oracle::cast_pixel(tris, ids, cam.fx, cam.fy, cam.cx, cam.cy, row, col);
        if (hit) {
          CHECK(std::abs(r.depth.at(row, col) - hit->depth) < 1e-4);
          CHECK(r.seg.at(row, col) == hit->instance);
        } else {
          CHECK(r.seg.at(row, col) == 0);
        }
      }
    }
  }
}

TEST_CASE("keypoint image: everything behind the camera is black") {
  const auto img = render_keypoints(hidden_joints(), Camera{});
  CHECK(img.channels == 3);
  CHECK(std::all_of(img.data.begin(), img.data.end(), [](auto v) { return v == 0; }));
}

TEST_CASE("keypoint image: single wrist joint draws a radius-4 disc") {
  auto joints = hidden_joints();
  joints[0] = Vec3(0, 0, 1);
  const Camera cam;
  const auto img = render_keypoints(joints, cam);
  const Rgb white = keypoint_color(0);
  CHECK(white == Rgb{255, 255, 255});
  int mismatches = 0, lit_count = 0;
  for (int row = 0; row < cam.height; ++row) {
    for (int col = 0; col < cam.width; ++col) {
      const bool lit = std::hypot(col + 0.5 - cam.cx, row + 0.5 - cam.cy) <= 4.0;
      lit_count += lit;
      for (int c = 0; c < 3; ++c) mismatches += img.at(row, col, c) != (lit ? white[c] : 0);
    }
  }
  CHECK(lit_count > 40);
  CHECK(mismatches == 0);
}

TEST_CASE("keypoint image: one bone matches the segment-distance oracle") {
  auto joints = hidden_joints();
  joints[0] = Vec3(-0.05, -0.03, 0.5);
  joints[1] = Vec3(0.08, 0.05, 0.5);
  const Camera cam;
  const auto img = render_keypoints(joints, cam);
  const auto p0 = project_point(cam, joints[0]);
  const auto p1 = project_point(cam, joints[1]);
  const oracle::V2 a(p0.u, p0.v), b(p1.u, p1.v);
  int mismatches = 0;
  for (int row = 0; row < cam.height; ++row) {
    for (int col = 0; col < cam.width; ++col) {
      const oracle::V2 c(col + 0.5, row + 0.5);
      Rgb expect{0, 0, 0};
      if ((c - b).norm() <= 4.0) {
        expect = keypoint_color(1);
      } else if ((c - a).norm() <= 4.0) {
        expect = keypoint_color(0);
      } else if (oracle::point_segment_2d(c, a, b) <= 1.5) {
        expect = keypoint_color(1);
      }
      for (int ch = 0; ch < 3; ++ch) mismatches += img.at(row, col, ch) != expect[ch];
    }
  }
  CHECK(mismatches == 0);
}

TEST_CASE("keypoint image depends only on the projected joints") {
  const KinematicHand hand = make_default_hand();
  HandPose p;
  p.translation = Vec3(0, 0, 0.5);
  const auto joints = forward_kinematics(hand, p);
  auto scaled = joints;
  for (int k = 0; k < kKeypointCount; ++k) scaled[k] *= 1.0 + 0.1 * k;  // slide along each viewing ray
  const Camera cam;
  CHECK(render_keypoints(joints, cam) == render_keypoints(scaled, cam));
  const auto img = render_keypoints(joints, cam);
  CHECK(std::any_of(img.data.begin(), img.data.end(), [](auto v) { return v != 0; }));
}

TEST_CASE("tracklets: static scene, determinism, shift, ordering invariance") {
  const Camera cam = small_camera();
  const std::vector<TriMesh> base{quad(-0.3, 0.3, -0.3, 0.3, 2.0, 2), quad(-0.1, 0.2, -0.2, 0.1, 1.5, 3)};
  MeshSequence still(4, base);
  const auto t1 = generate_tracklets(still, cam, 20, 99);
  REQUIRE(t1.size() == 20);
  for (const auto& t : t1) {
    CHECK(t.size() == 4);
    for (std::size_t f = 1; f < 4; ++f) CHECK(t.points[f] == t.points[0]);
  }
  const auto t2 = generate_tracklets(still, cam, 20, 99, 3);
  for (std::size_t i = 0; i < t1.size(); ++i) {
    CHECK(t1[i].points == t2[i].points);
    CHECK(t1[i].visible == t2[i].visible);
  }

  MeshSequence reordered(4, std::vector<TriMesh>{base[1], base[0]});
  const auto t3 = generate_tracklets(reordered, cam, 20, 99);
  for (std::size_t i = 0; i < t1.size(); ++i) CHECK(t1[i].points == t3[i].points);

  // One mesh translated in the camera plane at fixed depth.
  const std::vector<TriMesh> single{quad(-0.3, 0.3, -0.3, 0.3, 2.0, 2)};
  MeshSequence moving{single, single};
  const Vec3 delta(0.04, -0.02, 0.0);
  for (auto& v : moving[1][0].vertices) v += delta;
  const auto tm = generate_tracklets(moving, cam, 30, 5);
  for (const auto& t : tm) {
    const Vec2 shift = t.points[1] - t.points[0];
    CHECK(std::abs(shift.x() - cam.fx * delta.x() / 2.0) < 1e-9);
    CHECK(std::abs(shift.y() - cam.fy * delta.y() / 2.0) < 1e-9);
    CHECK(t.visible[0]);
  }
}

TEST_CASE("tracklets: empty first frame and JSON round trip") {
  const Camera cam = small_camera();
  MeshSequence behind{{quad(-0.3, 0.3, -0.3, 0.3, -2.0, 2)}};
  CHECK_THROWS_AS(generate_tracklets(behind, cam, 5, 1), Error);
  const std::vector<TriMesh> base{quad(-0.3, 0.3, -0.3, 0.3, 2.0, 2)};
  const auto t = generate_tracklets(MeshSequence(3, base), cam, 7, 1);
  const auto back = tracklets_from_json(nlohmann::json::parse(tracklets_to_json(t).dump()));
  REQUIRE(back.size() == 7);
  for (std::size_t i = 0; i < 7; ++i) {
    CHECK(back[i].points == t[i].points);
    CHECK(back[i].visible == t[i].visible);
  }
}

TEST_CASE("image files round trip") {
  DepthMap d(16, 8);
  d.at(2, 3) = 0.4567f;
  d.at(7, 15) = 2.5f;
  write_depth_png(d, temp_path("d.png"));
  const DepthMap dp = read_depth_png(temp_path("d.png"));
  CHECK(dp.width == 16);
  CHECK(dp.height == 8);
  CHECK(std::abs(dp.at(2, 3) - 0.4567f) <= 0.5e-4 + 1e-7);
  CHECK(dp.at(0, 0) == 0.0f);
  write_depth_pfm(d, temp_path("d.pfm"));
  CHECK(read_depth_pfm(temp_path("d.pfm")) == d);

  SegMap s(16, 8);
  s.at(1, 1) = 1;
  s.at(4, 9) = 2;
  write_seg_png(s, temp_path("s.png"));
  CHECK(read_seg_png(temp_path("s.png")) == s);

  Image8 rgb(16, 8, 3);
  rgb.at(3, 4, 0) = 200;
  rgb.at(3, 4, 2) = 17;
  write_rgb_png(rgb, temp_path("k.png"));
  CHECK(read_png8(temp_path("k.png")) == rgb);
  CHECK_THROWS_AS(read_png8(temp_path("missing.png")), Error);
}
