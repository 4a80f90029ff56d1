#pragma once

#include "hand_geometry/hand_model.hpp"
#include "hand_geometry/mesh.hpp"

#include <nlohmann/json_fwd.hpp>

#include <optional>
#include <string>
#include <vector>

namespace hoi {

enum class Easing { Linear, Smoothstep };

Easing easing_from_string(const std::string& name);
const char* easing_name(Easing e);
double ease(Easing e, double s);

struct TrajectoryConfig {
  int frame_count = 49;
  double contact_fraction = 0.5;  // object starts moving after this share of the clip
  double max_penetration_mm = 5.0;
  Easing easing = Easing::Smoothstep;
  double fps = 24.0;

  void validate() const;
};

struct PoseFrame {
  HandPose hand;
  ObjectPose object;
};

struct PoseSequence {
  std::vector<PoseFrame> frames;
  double fps = 24.0;

  std::size_t size() const { return frames.size(); }
};

// Deterministic pose interpolation. Frame 0 is (h0, o0) and the last frame is
// (hT, oT) verbatim. With no oT the object rides rigidly on the wrist after
// contact, so the last object pose is derived. `wrist` is the template wrist
// position the global hand rotation pivots about.
PoseSequence interpolate_sequence(const HandPose& h0, const HandPose& hT, const ObjectPose& o0,
                                  const std::optional<ObjectPose>& oT,
                                  const TrajectoryConfig& cfg, const Vec3& wrist = Vec3::Zero());

struct Endpoints {
  HandPose hand_start;
  HandPose hand_end;
  ObjectPose object_start;
  std::optional<ObjectPose> object_end;
};

struct ValidationReport {
  bool start_matches = false;
  bool end_matches = false;
  double max_joint_speed = 0.0;  // m/s
  double max_joint_accel = 0.0;  // m/s^2
  std::vector<double> penetration_m;
  double max_penetration_m = 0.0;
  bool pass = false;
};

// Endpoint flags compare the first/last frames against `expected`; without
// expectations both flags are true. Throws NonWatertight from the
// penetration check.
ValidationReport validate_sequence(const PoseSequence& seq, const KinematicHand& hand,
                                   const TriMesh& object, const TrajectoryConfig& cfg,
                                   const std::optional<Endpoints>& expected = std::nullopt,
                                   int jobs = 1);

nlohmann::json validation_to_json(const ValidationReport& r);

// {"schema": 1, "fps", "frames": [{"hand": {"trans", "rots"}, "object": {"rot", "trans"}}]}
nlohmann::json sequence_to_json(const PoseSequence& seq);
PoseSequence sequence_from_json(const nlohmann::json& j);
PoseSequence load_sequence(const std::string& path);
void save_sequence(const PoseSequence& seq, const std::string& path);

// {"schema": 1, "hand_start", "hand_end", "object_start", "object_end"?}
Endpoints endpoints_from_json(const nlohmann::json& j);
nlohmann::json endpoints_to_json(const Endpoints& e);
Endpoints load_endpoints(const std::string& path);

}  // namespace hoi
