#include "pipeline/manifest.hpp"

#include "common/error.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace hoi {

namespace fs = std::filesystem;

const std::vector<std::string>& manifest_path_keys() {
  static const std::vector<std::string> keys{
      "pose_sequence", "object_mesh", "generated_frames", "reference_frames", "gt_tracklets", "gen_tracklets",
      "gt_joints",     "pred_joints", "gt_vertices",      "pred_vertices",    "gt_features",  "gen_features"};
  return keys;
}

namespace {

std::string resolve(const std::string& p, const std::string& base) {
  if (base.empty() || fs::path(p).is_absolute()) return p;
  return (fs::path(base) / p).lexically_normal().string();
}

std::optional<std::string>* field(ClipRecord& r, const std::string& key) {
  if (key == "pose_sequence") return &r.pose_sequence;
  if (key == "object_mesh") return &r.object_mesh;
  if (key == "generated_frames") return &r.generated_frames;
  if (key == "reference_frames") return &r.reference_frames;
  if (key == "gt_tracklets") return &r.gt_tracklets;
  if (key == "gen_tracklets") return &r.gen_tracklets;
  if (key == "gt_joints") return &r.gt_joints;
  if (key == "pred_joints") return &r.pred_joints;
  if (key == "gt_vertices") return &r.gt_vertices;
  if (key == "pred_vertices") return &r.pred_vertices;
  if (key == "gt_features") return &r.gt_features;
  if (key == "gen_features") return &r.gen_features;
  return nullptr;
}

}  // namespace

ClipManifest parse_manifest(const std::string& text, const std::string& base_dir) {
  ClipManifest m;
  m.base_dir = base_dir;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "manifest line " + std::to_string(line_no);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::Schema, where + ": " + e.what());
    }
    if (!j.is_object()) fail(ErrorCode::Schema, where + ": expected a JSON object");
    if (!j.contains("id") || !j["id"].is_string() || j["id"].get<std::string>().empty()) {
      fail(ErrorCode::Schema, where + ": missing string 'id'");
    }
    ClipRecord r;
    r.id = j["id"].get<std::string>();
    if (!seen.insert(r.id).second) fail(ErrorCode::Schema, where + ": duplicate id '" + r.id + "'");
    for (const auto& key : manifest_path_keys()) {
      if (!j.contains(key) || j[key].is_null()) continue;
      if (!j[key].is_string()) fail(ErrorCode::Schema, where + ": '" + key + "' must be a path string");
      *field(r, key) = resolve(j[key].get<std::string>(), base_dir);
    }
    if (j.contains("pose_error_mm") && !j["pose_error_mm"].is_null()) {
      if (!j["pose_error_mm"].is_number()) fail(ErrorCode::Schema, where + ": 'pose_error_mm' must be a number");
      r.pose_error_mm = j["pose_error_mm"].get<double>();
      if (!std::isfinite(*r.pose_error_mm)) fail(ErrorCode::Schema, where + ": 'pose_error_mm' must be finite");
    }
    r.raw = std::move(j);
    m.clips.push_back(std::move(r));
  }
  return m;
}

ClipManifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open manifest '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_manifest(buf.str(), fs::path(path).parent_path().string());
}

void save_manifest(const std::vector<ClipRecord>& records, const std::string& source_base_dir,
                   const std::string& path) {
  const fs::path out_dir = fs::path(path).parent_path();
  const fs::path from = fs::absolute(source_base_dir.empty() ? fs::path(".") : fs::path(source_base_dir));
  const fs::path to = fs::absolute(out_dir.empty() ? fs::path(".") : out_dir);
  const bool same_dir = from.lexically_normal() == to.lexically_normal();

  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write manifest '" + path + "'");
  for (const auto& r : records) {
    nlohmann::json j = r.raw;
    if (!same_dir) {
      for (const auto& key : manifest_path_keys()) {
        if (!j.contains(key) || !j[key].is_string()) continue;
        const fs::path p(j[key].get<std::string>());
        if (p.is_absolute()) continue;
        j[key] = (from / p).lexically_normal().lexically_relative(to.lexically_normal()).generic_string();
      }
    }
    out << j.dump() << '\n';
  }
  if (!out) fail(ErrorCode::Io, "failed writing manifest '" + path + "'");
}

}  // namespace hoi
