#pragma once

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace hoi {

// One line of a JSON-lines manifest. Path fields are resolved against the
// manifest's directory on load; `raw` keeps the line as written so filtering
// can pass unknown fields through untouched.
struct ClipRecord {
  std::string id;
  std::optional<std::string> pose_sequence;
  std::optional<std::string> object_mesh;
  std::optional<std::string> generated_frames;  // directory of PNG frames
  std::optional<std::string> reference_frames;  // ground-truth frames for PSNR/SSIM
  std::optional<std::string> gt_tracklets;
  std::optional<std::string> gen_tracklets;
  std::optional<std::string> gt_joints;
  std::optional<std::string> pred_joints;
  std::optional<std::string> gt_vertices;
  std::optional<std::string> pred_vertices;
  std::optional<std::string> gt_features;   // feature matrix stem (no extension)
  std::optional<std::string> gen_features;
  std::optional<double> pose_error_mm;
  nlohmann::json raw;
};

struct ClipManifest {
  std::vector<ClipRecord> clips;
  std::string base_dir;
};

// Path-valued keys, in the order they are documented.
const std::vector<std::string>& manifest_path_keys();

// Blank lines are skipped. Throws Schema on malformed lines, missing or
// duplicate ids, or wrongly typed fields.
ClipManifest parse_manifest(const std::string& text, const std::string& base_dir);
ClipManifest load_manifest(const std::string& path);

// Writes the records' raw lines in order. Relative paths are rewritten so
// they still point at the same files from the new manifest's directory.
void save_manifest(const std::vector<ClipRecord>& records, const std::string& source_base_dir,
                   const std::string& path);

}  // namespace hoi
