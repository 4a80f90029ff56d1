#pragma once

#include "pipeline/config.hpp"
#include "pipeline/report.hpp"
#include "trajectory/trajectory.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace hoi {

// Hand from assets.hand (bundled procedural hand when unset) and the object
// from assets.object with its configured instance id.
KinematicHand load_configured_hand(const PipelineConfig& cfg);
TriMesh load_configured_object(const PipelineConfig& cfg);

struct TrajgenResult {
  PoseSequence sequence;
  ValidationReport validation;
};

// Writes the pose sequence to `sequence_path` and, when `report_path` is
// non-empty, the validation report next to it.
TrajgenResult run_trajgen(const PipelineConfig& cfg, const std::string& endpoints_path,
                          const std::string& sequence_path, const std::string& report_path, int jobs = 1);

// Layout under `out_dir`:
//   depth/depth_0000.png (or .pfm)   seg/seg_0000.png   keypoints/keypoints_0000.png
//   tracklets.json
// A clip whose first frame renders empty gets an empty tracklet file.
nlohmann::json run_render(const PipelineConfig& cfg, const std::string& sequence_path,
                          const std::string& out_dir, int jobs = 1);

// Reads a render directory, applies per-cue masking, and writes
// depth/seg/keypoint/concat latents (.f32 + .json) plus the projection blobs.
// Sidecars record whether the cue was masked.
nlohmann::json run_pack(const PipelineConfig& cfg, const std::string& conditions_dir,
                        const std::string& out_dir, int jobs = 1);

// Writes the report JSON and, when `csv_path` is non-empty, per-clip rows.
MetricsReport run_eval(const PipelineConfig& cfg, const std::string& manifest_path,
                       const std::string& report_path, const std::string& csv_path, int jobs = 1);

// Keeps manifest order; returns the kept ids. Every record needs
// pose_error_mm. Without `fraction` the configured discard fraction is used.
std::vector<std::string> run_filter(const PipelineConfig& cfg, const std::string& manifest_path,
                                    const std::string& out_path, std::optional<double> fraction = std::nullopt);

struct PipelineInputs {
  std::string endpoints_path;
  std::string out_dir;
  std::string generated_dir;  // optional: frames (and tracklets.json) from the external model
  std::string reference_dir;  // optional: ground-truth frames for PSNR/SSIM
};

// poses/ -> conditions/ -> latents/ -> report.json. A failing stage leaves
// earlier outputs in place, records itself in report.json and rethrows.
nlohmann::json run_pipeline(const PipelineConfig& cfg, const PipelineInputs& in, int jobs = 1);

}  // namespace hoi
