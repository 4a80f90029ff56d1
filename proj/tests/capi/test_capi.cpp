// Exercises the shared library through its public header only.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hoiforge/hoiforge.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace {

std::string toy(const std::string& f) { return std::string(HOI_SOURCE_DIR) + "/assets/toy/" + f; }

std::string scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "hoi_capi" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

}  // namespace

TEST_CASE("status names and exit codes") {
  CHECK(std::string(hf_status_name(HF_OK)) == "Ok");
  CHECK(std::string(hf_status_name(HF_ERR_SCHEMA)) == "SchemaError");
  CHECK(hf_exit_code(HF_OK) == 0);
  CHECK(hf_exit_code(HF_ERR_INTERNAL) == 1);
  CHECK(hf_exit_code(HF_ERR_SCHEMA) == 2);
  CHECK(hf_exit_code(HF_ERR_IO) == 2);
  CHECK(hf_exit_code(HF_ERR_SHAPE) == 3);
  CHECK(hf_exit_code(HF_ERR_LENGTH_MISMATCH) == 3);
  CHECK(std::string(hf_version()).size() > 0);
}

TEST_CASE("hand handles") {
  hf_hand* hand = nullptr;
  REQUIRE(hf_hand_create_default(&hand) == HF_OK);
  size_t n = 0;
  REQUIRE(hf_hand_vertex_count(hand, &n) == HF_OK);
  CHECK(n > 0);

  double pose[HF_POSE_SCALARS] = {0.1, 0.0, 0.0};
  double joints[3 * HF_KEYPOINTS];
  double rest[3 * HF_KEYPOINTS];
  double zero[HF_POSE_SCALARS] = {};
  REQUIRE(hf_hand_forward_kinematics(hand, zero, rest) == HF_OK);
  REQUIRE(hf_hand_forward_kinematics(hand, pose, joints) == HF_OK);
  for (int k = 0; k < HF_KEYPOINTS; ++k) {
    CHECK(joints[3 * k] == doctest::Approx(rest[3 * k] + 0.1));
    CHECK(joints[3 * k + 1] == rest[3 * k + 1]);
  }

  std::vector<double> verts(3 * n);
  CHECK(hf_hand_skin(hand, pose, verts.data(), n) == HF_OK);
  CHECK(hf_hand_skin(hand, pose, verts.data(), n - 1) == HF_ERR_INVALID_ARGUMENT);
  CHECK(std::string(hf_last_error()).find("vertex buffer") != std::string::npos);
  CHECK(hf_hand_forward_kinematics(nullptr, pose, joints) == HF_ERR_INVALID_ARGUMENT);

  hf_hand* loaded = nullptr;
  REQUIRE(hf_hand_load(toy("hand.json").c_str(), &loaded) == HF_OK);
  double j2[3 * HF_KEYPOINTS];
  REQUIRE(hf_hand_forward_kinematics(loaded, pose, j2) == HF_OK);
  for (int i = 0; i < 3 * HF_KEYPOINTS; ++i) CHECK(j2[i] == joints[i]);
  hf_hand_free(loaded);
  CHECK(hf_hand_load("/nonexistent.json", &loaded) == HF_ERR_IO);

  hf_mesh* cube = nullptr;
  REQUIRE(hf_mesh_load_obj(toy("cube.obj").c_str(), 2, &cube) == HF_OK);
  size_t cv = 0;
  CHECK(hf_mesh_vertex_count(cube, &cv) == HF_OK);
  CHECK(cv == 8);
  double rot[3] = {0, 0, 0}, far[3] = {5, 5, 5}, pen = -1;
  CHECK(hf_penetration_depth(hand, zero, cube, rot, far, &pen) == HF_OK);
  CHECK(pen == 0.0);
  double at_wrist[3] = {0, 0.05, 0};
  CHECK(hf_penetration_depth(hand, zero, cube, rot, at_wrist, &pen) == HF_OK);
  CHECK(pen > 0.0);
  hf_mesh_free(cube);
  hf_hand_free(hand);
}

TEST_CASE("metric entry points") {
  // Two tracks of 3 frames; identical sets give 2.
  const double tracks[] = {0, 0, 1, 0, 2, 1, 5, 5, 5, 6, 4, 6};
  double mf = 0;
  REQUIRE(hf_motion_fidelity(tracks, 2, tracks, 2, 3, 1e-6, &mf) == HF_OK);
  CHECK(mf == 2.0);
  CHECK(hf_motion_fidelity(tracks, 0, tracks, 2, 3, 1e-6, &mf) == HF_ERR_EMPTY_SET);

  double gt[63], pred[63];
  for (int i = 0; i < 63; ++i) gt[i] = pred[i] = std::sin(i * 1.7) * 40;
  pred[3 * 4] += 5.0;
  double e = 0;
  REQUIRE(hf_mpjpe(pred, gt, &e) == HF_OK);
  CHECK(e == doctest::Approx(5.0 / 21.0));
  REQUIRE(hf_pa_mpjpe(gt, gt, &e) == HF_OK);
  CHECK(e < 1e-9);
  REQUIRE(hf_pa_mpvpe(gt, gt, 21, &e) == HF_OK);
  CHECK(e < 1e-9);
  REQUIRE(hf_fscore(gt, 21, gt, 21, 5.0, &e) == HF_OK);
  CHECK(e == 1.0);

  std::vector<uint8_t> a(16 * 16, 0), b = a;
  b[37] = 255;
  REQUIRE(hf_psnr(a.data(), b.data(), 16, 16, 1, &e) == HF_OK);
  CHECK(e == doctest::Approx(10 * std::log10(256.0)));
  REQUIRE(hf_ssim(a.data(), a.data(), 16, 16, 1, &e) == HF_OK);
  CHECK(e == 1.0);

  const double f1[] = {0, 2};
  const double f2[] = {1, 3};
  REQUIRE(hf_frechet_distance(f1, 2, f2, 2, 1, &e) == HF_OK);
  CHECK(e == doctest::Approx(1.0));
  CHECK(hf_frechet_distance(f1, 1, f2, 2, 1, &e) == HF_ERR_INSUFFICIENT_SAMPLES);
}

TEST_CASE("config and commands") {
  hf_config* cfg = nullptr;
  REQUIRE(hf_config_load(toy("config.ini").c_str(), &cfg) == HF_OK);
  int frames = 0;
  CHECK(hf_config_frame_count(cfg, &frames) == HF_OK);
  CHECK(frames == 49);
  const char* js = nullptr;
  REQUIRE(hf_config_to_json(cfg, &js) == HF_OK);
  CHECK(std::string(js).find("\"tracklet_count\"") != std::string::npos);
  CHECK(hf_config_set_asset(cfg, "texture", "x") == HF_ERR_INVALID_ARGUMENT);
  CHECK(hf_config_apply_seed_override(cfg, 3) == HF_OK);

  const std::string dir = scratch("trajgen");
  const std::string seq = dir + "/seq.json", rep = dir + "/report.json";
  REQUIRE(hf_run_trajgen(cfg, toy("endpoints.json").c_str(), seq.c_str(), rep.c_str(), 2) == HF_OK);
  CHECK(std::string(hf_last_output()).find("\"pass\"") != std::string::npos);
  CHECK(std::filesystem::exists(seq));
  CHECK(std::filesystem::exists(rep));

  const std::string bad = dir + "/bad.json";
  std::ofstream(bad) << "{\"schema\": 1, \"hand_start\": 3}";
  CHECK(hf_run_trajgen(cfg, bad.c_str(), seq.c_str(), nullptr, 1) == HF_ERR_SCHEMA);
  CHECK(std::string(hf_last_error()).size() > 0);
  CHECK(hf_run_pack(cfg, (dir + "/none").c_str(), (dir + "/lat").c_str(), 1) == HF_ERR_IO);

  hf_config* missing = nullptr;
  CHECK(hf_config_load("/nonexistent/config.ini", &missing) == HF_ERR_IO);
  CHECK(missing == nullptr);
  hf_config_free(cfg);
}
