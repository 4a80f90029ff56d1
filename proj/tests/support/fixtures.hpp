#pragma once

// Helpers that lay out small evaluation clips and configs on disk.

#include "metrics/frechet.hpp"
#include "metrics/pose_metrics.hpp"
#include "raster/image_io.hpp"
#include "raster/tracklets.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

namespace fixture {

namespace fs = std::filesystem;

inline std::string fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "hoi_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::string source_dir() { return HOI_SOURCE_DIR; }
inline std::string toy(const std::string& file) { return source_dir() + "/assets/toy/" + file; }

// Small-camera toy config: 9 frames at 160x96.
inline std::string small_config(const std::string& dir, double mask_p = 0.2, int frames = 9) {
  const std::string path = dir + "/config.ini";
  char buf[2048];
  std::snprintf(buf, sizeof buf,
                "[camera]\nfx = 200\nfy = 200\ncx = 80\ncy = 48\nwidth = 160\nheight = 96\n"
                "[trajectory]\nframe_count = %d\n"
                "[conditioning]\nmask_probability = %g\n"
                "[seeds]\nmask = 7\ndepth_encoder = 11\nseg_encoder = 13\nkeypoint_encoder = 17\ntracklets = 23\n"
                "[metrics]\ntracklet_count = 40\n"
                "[assets]\nhand = %s\nobject = %s\n",
                frames, mask_p, toy("hand.json").c_str(), toy("cube.obj").c_str());
  write_text(path, buf);
  return path;
}

inline std::vector<hoi::Tracklet> random_tracks(std::mt19937_64& g, int n, int frames) {
  std::normal_distribution<double> d(0.0, 2.0);
  std::vector<hoi::Tracklet> out(n);
  for (auto& t : out) {
    hoi::Vec2 p(d(g) * 20, d(g) * 20);
    for (int f = 0; f < frames; ++f) {
      t.points.push_back(p);
      t.visible.push_back(true);
      p += hoi::Vec2(d(g), d(g));
    }
  }
  return out;
}

inline std::vector<std::vector<hoi::Vec3>> random_points(std::mt19937_64& g, int frames, int n, double spread) {
  std::uniform_real_distribution<double> u(-spread, spread);
  std::vector<std::vector<hoi::Vec3>> out(frames);
  for (auto& f : out)
    for (int k = 0; k < n; ++k) f.emplace_back(u(g), u(g), u(g));
  return out;
}

inline void write_points(const std::vector<std::vector<hoi::Vec3>>& frames, const std::string& path) {
  write_text(path, hoi::point_frames_to_json(frames).dump());
}

inline void write_frames(std::mt19937_64& g, const std::string& dir, int count, int w, int h) {
  fs::create_directories(dir);
  for (int i = 0; i < count; ++i) {
    hoi::Image8 img(w, h, 3);
    for (auto& v : img.data) v = static_cast<std::uint8_t>(g() % 256);
    char name[32];
    std::snprintf(name, sizeof name, "/frame_%04d.png", i);
    hoi::write_rgb_png(img, dir + name);
  }
}

inline hoi::Image8 blur_copy(const hoi::Image8& img) {
  hoi::Image8 out = img;
  for (int r = 1; r + 1 < img.height; ++r)
    for (int c = 1; c + 1 < img.width; ++c)
      for (int ch = 0; ch < img.channels; ++ch)
        out.at(r, c, ch) = static_cast<std::uint8_t>((img.at(r, c - 1, ch) + 2 * img.at(r, c, ch) + img.at(r, c + 1, ch)) / 4);
  return out;
}

// One clip directory with every input kind. `perturb` = false gives a
// generated side identical to the ground truth.
struct ClipFiles {
  nlohmann::json line;
};

inline ClipFiles make_clip(const std::string& root, const std::string& id, std::uint64_t seed, bool perturb) {
  std::mt19937_64 g(seed);
  const std::string dir = root + "/" + id;
  fs::create_directories(dir);
  const auto gt_tracks = random_tracks(g, 12, 9);
  auto gen_tracks = perturb ? random_tracks(g, 10, 9) : gt_tracks;
  hoi::save_tracklets(gt_tracks, dir + "/gt_tracks.json");
  hoi::save_tracklets(gen_tracks, dir + "/gen_tracks.json");

  write_frames(g, dir + "/ref", 3, 32, 24);
  fs::create_directories(dir + "/gen");
  for (const auto& e : fs::directory_iterator(dir + "/ref")) {
    auto img = hoi::read_png8(e.path().string());
    if (perturb) img = blur_copy(img);
    hoi::write_rgb_png(img, dir + "/gen/" + e.path().filename().string());
  }

  const auto gt_j = random_points(g, 4, 21, 80);
  auto pred_j = gt_j;
  const auto gt_v = random_points(g, 2, 60, 80);
  auto pred_v = gt_v;
  if (perturb) {
    std::normal_distribution<double> n(0.0, 4.0);
    for (auto& f : pred_j)
      for (auto& p : f) p += hoi::Vec3(n(g), n(g), n(g));
    for (auto& f : pred_v)
      for (auto& p : f) p += hoi::Vec3(n(g), n(g), n(g));
  }
  write_points(gt_j, dir + "/gt_joints.json");
  write_points(pred_j, dir + "/pred_joints.json");
  write_points(gt_v, dir + "/gt_verts.json");
  write_points(pred_v, dir + "/pred_verts.json");

  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd fg(20, 3), fq(20, 3);
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 3; ++j) {
      fg(i, j) = n(g);
      fq(i, j) = perturb ? n(g) + 0.5 : fg(i, j);
    }
  hoi::save_feature_matrix(fg, dir + "/gt_feat");
  hoi::save_feature_matrix(fq, dir + "/gen_feat");

  ClipFiles c;
  c.line = {{"id", id},
            {"gt_tracklets", id + "/gt_tracks.json"},
            {"gen_tracklets", id + "/gen_tracks.json"},
            {"reference_frames", id + "/ref"},
            {"generated_frames", id + "/gen"},
            {"gt_joints", id + "/gt_joints.json"},
            {"pred_joints", id + "/pred_joints.json"},
            {"gt_vertices", id + "/gt_verts.json"},
            {"pred_vertices", id + "/pred_verts.json"},
            {"gt_features", id + "/gt_feat"},
            {"gen_features", id + "/gen_feat"}};
  return c;
}

inline std::string write_manifest(const std::string& root, const std::vector<nlohmann::json>& lines) {
  std::string text;
  for (const auto& l : lines) text += l.dump() + "\n";
  const std::string path = root + "/manifest.jsonl";
  write_text(path, text);
  return path;
}

}  // namespace fixture
