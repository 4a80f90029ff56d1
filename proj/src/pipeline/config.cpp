#include "pipeline/config.hpp"

#include "common/error.hpp"
#include "common/rng.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace hoi {

using nlohmann::json;

void PipelineConfig::validate() const {
  camera.validate();
  trajectory.validate();
  if (camera.width % 8 != 0 || camera.height % 8 != 0) {
    fail(ErrorCode::Schema, "camera resolution must be divisible by 8 for latent packing");
  }
  if ((trajectory.frame_count - 1) % 4 != 0) {
    fail(ErrorCode::Schema, "frame_count must be 1 + 4k for latent packing");
  }
  if (!(mask_probability >= 0.0 && mask_probability <= 1.0)) {
    fail(ErrorCode::Schema, "mask_probability must lie in [0, 1]");
  }
  if (tracklet_count < 1) fail(ErrorCode::Schema, "tracklet_count must be >= 1");
  for (double t : fscore_thresholds_mm) {
    if (!(t > 0.0)) fail(ErrorCode::Schema, "fscore thresholds must be > 0");
  }
  if (!(mf_epsilon > 0.0)) fail(ErrorCode::Schema, "mf_epsilon must be > 0");
  if (!(discard_fraction >= 0.0 && discard_fraction < 1.0)) {
    fail(ErrorCode::Schema, "discard_fraction must lie in [0, 1)");
  }
  if (object_instance_id < 2 || object_instance_id > 255) {
    fail(ErrorCode::Schema, "object_instance_id must lie in [2, 255]");
  }
}

void PipelineConfig::apply_seed_override(std::uint64_t k) {
  seeds.mask = Rng::mix(k + 0);
  seeds.depth_encoder = Rng::mix(k + 1);
  seeds.seg_encoder = Rng::mix(k + 2);
  seeds.keypoint_encoder = Rng::mix(k + 3);
  seeds.tracklets = Rng::mix(k + 4);
}

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"camera", {"fx", "fy", "cx", "cy", "width", "height", "rotation", "translation"}},
      {"trajectory", {"frame_count", "fps", "contact_fraction", "max_penetration_mm", "easing"}},
      {"conditioning", {"mask_probability", "depth_format"}},
      {"seeds", {"mask", "depth_encoder", "seg_encoder", "keypoint_encoder", "tracklets"}},
      {"metrics", {"tracklet_count", "fscore_thresholds_mm", "mf_epsilon", "discard_fraction"}},
      {"assets", {"hand", "object", "object_instance_id"}},
  };
  return s;
}

std::string where(const std::string& section, const std::string& key) { return section + "." + key; }

std::vector<double> as_numbers(const json& v, const std::string& name) {
  std::vector<double> out;
  if (v.is_number()) {
    out.push_back(v.get<double>());
  } else if (v.is_array()) {
    for (const auto& e : v) {
      if (!e.is_number()) fail(ErrorCode::Schema, name + ": expected numbers");
      out.push_back(e.get<double>());
    }
  } else if (v.is_string()) {
    std::istringstream in(v.get<std::string>());
    std::string tok;
    while (in >> tok) {
      try {
        std::size_t used = 0;
        out.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        fail(ErrorCode::Schema, name + ": '" + tok + "' is not a number");
      }
    }
  } else {
    fail(ErrorCode::Schema, name + ": expected a number");
  }
  return out;
}

double as_double(const json& v, const std::string& name) {
  const auto n = as_numbers(v, name);
  if (n.size() != 1) fail(ErrorCode::Schema, name + ": expected a single number");
  return n[0];
}

int as_int(const json& v, const std::string& name) {
  const double d = as_double(v, name);
  if (d != std::floor(d) || std::abs(d) > 1e9) fail(ErrorCode::Schema, name + ": expected an integer");
  return static_cast<int>(d);
}

std::uint64_t as_seed(const json& v, const std::string& name) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) {
    const auto i = v.get<std::int64_t>();
    if (i < 0) fail(ErrorCode::Schema, name + ": seeds must be non-negative");
    return static_cast<std::uint64_t>(i);
  }
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    try {
      std::size_t used = 0;
      const auto x = std::stoull(s, &used);
      if (used != s.size() || s.empty() || s[0] == '-') throw std::invalid_argument(s);
      return x;
    } catch (const std::exception&) {
      fail(ErrorCode::Schema, name + ": '" + s + "' is not a non-negative integer seed");
    }
  }
  fail(ErrorCode::Schema, name + ": expected an integer seed");
}

Vec3 as_vec3(const json& v, const std::string& name) {
  const auto n = as_numbers(v, name);
  if (n.size() != 3) fail(ErrorCode::Schema, name + ": expected 3 numbers");
  return Vec3(n[0], n[1], n[2]);
}

std::string as_string(const json& v, const std::string& name) {
  if (!v.is_string()) fail(ErrorCode::Schema, name + ": expected a string");
  return v.get<std::string>();
}

std::string resolve(const std::string& path, const std::string& base_dir) {
  if (path.empty() || base_dir.empty()) return path;
  const std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

}  // namespace

PipelineConfig config_from_json(const json& j, const std::string& base_dir) {
  if (!j.is_object()) fail(ErrorCode::Schema, "config must be an object of sections");
  for (const auto& [section, body] : j.items()) {
    const auto it = schema().find(section);
    if (it == schema().end()) fail(ErrorCode::Schema, "unknown config section '" + section + "'");
    if (!body.is_object()) fail(ErrorCode::Schema, "config section '" + section + "' must be a table");
    for (const auto& [key, _] : body.items()) {
      if (!it->second.count(key)) fail(ErrorCode::Schema, "unknown config key '" + where(section, key) + "'");
    }
  }
  auto has = [&](const char* s, const char* k) { return j.contains(s) && j.at(s).contains(k); };
  auto get = [&](const char* s, const char* k) -> const json& { return j.at(s).at(k); };

  PipelineConfig cfg;
  auto& cam = cfg.camera;
  if (has("camera", "fx")) cam.fx = as_double(get("camera", "fx"), "camera.fx");
  if (has("camera", "fy")) cam.fy = as_double(get("camera", "fy"), "camera.fy");
  if (has("camera", "cx")) cam.cx = as_double(get("camera", "cx"), "camera.cx");
  if (has("camera", "cy")) cam.cy = as_double(get("camera", "cy"), "camera.cy");
  if (has("camera", "width")) cam.width = as_int(get("camera", "width"), "camera.width");
  if (has("camera", "height")) cam.height = as_int(get("camera", "height"), "camera.height");
  if (has("camera", "rotation")) {
    cam.world_to_camera.rotation = axis_angle_to_matrix(as_vec3(get("camera", "rotation"), "camera.rotation"));
  }
  if (has("camera", "translation")) {
    cam.world_to_camera.translation = as_vec3(get("camera", "translation"), "camera.translation");
  }

  auto& tr = cfg.trajectory;
  if (has("trajectory", "frame_count")) tr.frame_count = as_int(get("trajectory", "frame_count"), "trajectory.frame_count");
  if (has("trajectory", "fps")) tr.fps = as_double(get("trajectory", "fps"), "trajectory.fps");
  if (has("trajectory", "contact_fraction")) {
    tr.contact_fraction = as_double(get("trajectory", "contact_fraction"), "trajectory.contact_fraction");
  }
  if (has("trajectory", "max_penetration_mm")) {
    tr.max_penetration_mm = as_double(get("trajectory", "max_penetration_mm"), "trajectory.max_penetration_mm");
  }
  if (has("trajectory", "easing")) tr.easing = easing_from_string(as_string(get("trajectory", "easing"), "trajectory.easing"));

  if (has("conditioning", "mask_probability")) {
    cfg.mask_probability = as_double(get("conditioning", "mask_probability"), "conditioning.mask_probability");
  }
  if (has("conditioning", "depth_format")) {
    const auto f = as_string(get("conditioning", "depth_format"), "conditioning.depth_format");
    if (f == "png") {
      cfg.depth_format = DepthFormat::Png;
    } else if (f == "pfm") {
      cfg.depth_format = DepthFormat::Pfm;
    } else {
      fail(ErrorCode::Schema, "conditioning.depth_format must be png or pfm");
    }
  }

  // Seeds are mandatory: no run may fall back to an implicit seed.
  for (const char* k : {"mask", "depth_encoder", "seg_encoder", "keypoint_encoder", "tracklets"}) {
    if (!has("seeds", k)) fail(ErrorCode::Schema, std::string("missing required seed 'seeds.") + k + "'");
  }
  cfg.seeds.mask = as_seed(get("seeds", "mask"), "seeds.mask");
  cfg.seeds.depth_encoder = as_seed(get("seeds", "depth_encoder"), "seeds.depth_encoder");
  cfg.seeds.seg_encoder = as_seed(get("seeds", "seg_encoder"), "seeds.seg_encoder");
  cfg.seeds.keypoint_encoder = as_seed(get("seeds", "keypoint_encoder"), "seeds.keypoint_encoder");
  cfg.seeds.tracklets = as_seed(get("seeds", "tracklets"), "seeds.tracklets");

  if (has("metrics", "tracklet_count")) cfg.tracklet_count = as_int(get("metrics", "tracklet_count"), "metrics.tracklet_count");
  if (has("metrics", "fscore_thresholds_mm")) {
    cfg.fscore_thresholds_mm = as_numbers(get("metrics", "fscore_thresholds_mm"), "metrics.fscore_thresholds_mm");
  }
  if (has("metrics", "mf_epsilon")) cfg.mf_epsilon = as_double(get("metrics", "mf_epsilon"), "metrics.mf_epsilon");
  if (has("metrics", "discard_fraction")) {
    cfg.discard_fraction = as_double(get("metrics", "discard_fraction"), "metrics.discard_fraction");
  }

  if (has("assets", "hand")) cfg.hand_model = resolve(as_string(get("assets", "hand"), "assets.hand"), base_dir);
  if (has("assets", "object")) cfg.object_mesh = resolve(as_string(get("assets", "object"), "assets.object"), base_dir);
  if (has("assets", "object_instance_id")) {
    cfg.object_instance_id = as_int(get("assets", "object_instance_id"), "assets.object_instance_id");
  }

  cfg.validate();
  return cfg;
}

PipelineConfig parse_ini_config(const std::string& text, const std::string& base_dir) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    fail(ErrorCode::Schema, std::string("config: ") + e.what());
  }
  json j = json::object();
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      fail(ErrorCode::Schema, "config key '" + section + "' must sit inside a [section]");
    }
    json sec = json::object();
    for (const auto& [key, value] : body) sec[key] = value.data();
    j[section] = sec;
  }
  return config_from_json(j, base_dir);
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string base = std::filesystem::path(path).parent_path().string();
  if (std::filesystem::path(path).extension() == ".json") {
    json j;
    try {
      j = json::parse(buf.str());
    } catch (const json::exception& e) {
      fail(ErrorCode::Schema, path + ": " + e.what());
    }
    return config_from_json(j, base);
  }
  return parse_ini_config(buf.str(), base);
}

json config_to_json(const PipelineConfig& cfg) {
  const auto& c = cfg.camera;
  const Vec3 rot = matrix_to_axis_angle(c.world_to_camera.rotation);
  const Vec3& t = c.world_to_camera.translation;
  return {
      {"camera",
       {{"fx", c.fx}, {"fy", c.fy}, {"cx", c.cx}, {"cy", c.cy}, {"width", c.width}, {"height", c.height},
        {"rotation", {rot.x(), rot.y(), rot.z()}}, {"translation", {t.x(), t.y(), t.z()}}}},
      {"trajectory",
       {{"frame_count", cfg.trajectory.frame_count}, {"fps", cfg.trajectory.fps},
        {"contact_fraction", cfg.trajectory.contact_fraction},
        {"max_penetration_mm", cfg.trajectory.max_penetration_mm},
        {"easing", easing_name(cfg.trajectory.easing)}}},
      {"conditioning",
       {{"mask_probability", cfg.mask_probability},
        {"depth_format", cfg.depth_format == DepthFormat::Png ? "png" : "pfm"}}},
      {"seeds",
       {{"mask", cfg.seeds.mask}, {"depth_encoder", cfg.seeds.depth_encoder},
        {"seg_encoder", cfg.seeds.seg_encoder}, {"keypoint_encoder", cfg.seeds.keypoint_encoder},
        {"tracklets", cfg.seeds.tracklets}}},
      {"metrics",
       {{"tracklet_count", cfg.tracklet_count}, {"fscore_thresholds_mm", cfg.fscore_thresholds_mm},
        {"mf_epsilon", cfg.mf_epsilon}, {"discard_fraction", cfg.discard_fraction}}},
      {"assets",
       {{"hand", cfg.hand_model}, {"object", cfg.object_mesh}, {"object_instance_id", cfg.object_instance_id}}},
  };
}

}  // namespace hoi
