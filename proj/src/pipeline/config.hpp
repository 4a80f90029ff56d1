#pragma once

#include "raster/camera.hpp"
#include "trajectory/trajectory.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace hoi {

struct SeedConfig {
  std::uint64_t mask = 0;
  std::uint64_t depth_encoder = 0;
  std::uint64_t seg_encoder = 0;
  std::uint64_t keypoint_encoder = 0;
  std::uint64_t tracklets = 0;
};

enum class DepthFormat { Png, Pfm };

struct PipelineConfig {
  Camera camera;
  TrajectoryConfig trajectory;
  double mask_probability = 0.2;
  DepthFormat depth_format = DepthFormat::Png;
  SeedConfig seeds;
  int tracklet_count = 100;
  std::vector<double> fscore_thresholds_mm{5.0, 15.0};
  double mf_epsilon = 1e-6;
  double discard_fraction = 0.25;
  std::string hand_model;  // empty: bundled procedural hand
  std::string object_mesh;
  int object_instance_id = 2;

  // Range and divisibility checks; throws Schema.
  void validate() const;

  // Every seed becomes mix(k + slot), so one integer re-seeds the whole run.
  void apply_seed_override(std::uint64_t k);
};

// Sections and keys (INI shown; the JSON form nests the same names):
//   [camera]       fx fy cx cy width height rotation translation
//   [trajectory]   frame_count fps contact_fraction max_penetration_mm easing
//   [conditioning] mask_probability depth_format
//   [seeds]        mask depth_encoder seg_encoder keypoint_encoder tracklets   (all required)
//   [metrics]      tracklet_count fscore_thresholds_mm mf_epsilon discard_fraction
//   [assets]       hand object object_instance_id
// Vectors are whitespace separated in INI, arrays in JSON. Unknown sections
// or keys are rejected. Relative asset paths resolve against the config file.
PipelineConfig load_config(const std::string& path);
PipelineConfig config_from_json(const nlohmann::json& j, const std::string& base_dir = {});
PipelineConfig parse_ini_config(const std::string& text, const std::string& base_dir = {});
nlohmann::json config_to_json(const PipelineConfig& cfg);

}  // namespace hoi
