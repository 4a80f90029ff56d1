#include "trajectory/trajectory.hpp"

#include "common/error.hpp"
#include "common/parallel.hpp"
#include "hand_geometry/proximity.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>

namespace hoi {

using nlohmann::json;

Easing easing_from_string(const std::string& name) {
  if (name == "linear") return Easing::Linear;
  if (name == "smoothstep") return Easing::Smoothstep;
  fail(ErrorCode::Schema, "unknown easing '" + name + "' (expected linear|smoothstep)");
}

const char* easing_name(Easing e) { return e == Easing::Linear ? "linear" : "smoothstep"; }

double ease(Easing e, double s) { return e == Easing::Linear ? s : smoothstep(s); }

void TrajectoryConfig::validate() const {
  if (frame_count < 2) fail(ErrorCode::Schema, "frame_count must be >= 2");
  if (!(contact_fraction >= 0.0 && contact_fraction <= 1.0)) {
    fail(ErrorCode::Schema, "contact_fraction must lie in [0, 1]");
  }
  if (!(max_penetration_mm >= 0.0)) fail(ErrorCode::Schema, "max_penetration_mm must be >= 0");
  if (!(fps > 0.0)) fail(ErrorCode::Schema, "fps must be > 0");
}

namespace {

HandPose blend_hand(const HandPose& h0, const HandPose& hT, double e) {
  HandPose h;
  h.translation = h0.translation + e * (hT.translation - h0.translation);
  for (int a = 0; a < kArticulatedCount; ++a) {
    const Quat q = slerp_shortest(axis_angle_to_quat(h0.rotations[a]),
                                  axis_angle_to_quat(hT.rotations[a]), e);
    h.rotations[a] = quat_to_axis_angle(q);
  }
  return h;
}

ObjectPose screw_blend(const ObjectPose& o0, const ObjectPose& oT, double e) {
  ObjectPose o;
  o.rotation = quat_to_axis_angle(
      slerp_shortest(axis_angle_to_quat(o0.rotation), axis_angle_to_quat(oT.rotation), e));
  o.translation = o0.translation + e * (oT.translation - o0.translation);
  return o;
}

ObjectPose from_transform(const RigidTransform& g) {
  return {matrix_to_axis_angle(g.rotation), g.translation};
}

}  // namespace

PoseSequence interpolate_sequence(const HandPose& h0, const HandPose& hT, const ObjectPose& o0,
                                  const std::optional<ObjectPose>& oT,
                                  const TrajectoryConfig& cfg, const Vec3& wrist) {
  cfg.validate();
  const int n = cfg.frame_count;
  const double c = cfg.contact_fraction;

  // Wrist pose at the moment of contact, used by the follow mode.
  const HandPose hand_at_contact = blend_hand(h0, hT, ease(cfg.easing, c));
  const RigidTransform contact_inv = wrist_transform(wrist, hand_at_contact).inverse();
  const RigidTransform object_start = o0.transform();

  auto object_at = [&](double s, const HandPose& hand) -> ObjectPose {
    if (s <= c) return o0;
    if (oT) {
      const double u = c < 1.0 ? (s - c) / (1.0 - c) : 1.0;
      return screw_blend(o0, *oT, ease(cfg.easing, u));
    }
    const RigidTransform follow =
        wrist_transform(wrist, hand).compose(contact_inv).compose(object_start);
    return from_transform(follow);
  };

  PoseSequence seq;
  seq.fps = cfg.fps;
  seq.frames.resize(n);
  seq.frames.front() = {h0, o0};
  for (int i = 1; i + 1 < n; ++i) {
    const double s = double(i) / double(n - 1);
    const HandPose hand = blend_hand(h0, hT, ease(cfg.easing, s));
    seq.frames[i] = {hand, object_at(s, hand)};
  }
  seq.frames.back() = {hT, oT ? *oT : object_at(1.0, hT)};
  return seq;
}

ValidationReport validate_sequence(const PoseSequence& seq, const KinematicHand& hand,
                                   const TriMesh& object, const TrajectoryConfig& cfg,
                                   const std::optional<Endpoints>& expected, int jobs) {
  if (seq.frames.empty()) fail(ErrorCode::Shape, "pose sequence is empty");
  const std::size_t n = seq.frames.size();

  ValidationReport r;
  r.start_matches = true;
  r.end_matches = true;
  if (expected) {
    r.start_matches = seq.frames.front().hand == expected->hand_start &&
                      seq.frames.front().object == expected->object_start;
    r.end_matches = seq.frames.back().hand == expected->hand_end &&
                    (!expected->object_end || seq.frames.back().object == *expected->object_end);
  }

  std::vector<std::array<Vec3, kKeypointCount>> joints(n);
  r.penetration_m.assign(n, 0.0);
  parallel_for(n, jobs, [&](std::size_t t) {
    const auto& f = seq.frames[t];
    joints[t] = forward_kinematics(hand, f.hand);
    r.penetration_m[t] = penetration_depth(skin_mesh(hand, f.hand), apply_object_pose(object, f.object));
  });

  const double fps = seq.fps;
  for (std::size_t t = 0; t + 1 < n; ++t) {
    for (int k = 0; k < kKeypointCount; ++k) {
      r.max_joint_speed = std::max(r.max_joint_speed, (joints[t + 1][k] - joints[t][k]).norm() * fps);
      if (t >= 1) {
        const Vec3 acc = joints[t + 1][k] - 2.0 * joints[t][k] + joints[t - 1][k];
        r.max_joint_accel = std::max(r.max_joint_accel, acc.norm() * fps * fps);
      }
    }
  }
  for (double p : r.penetration_m) r.max_penetration_m = std::max(r.max_penetration_m, p);
  r.pass = r.start_matches && r.end_matches && r.max_penetration_m <= cfg.max_penetration_mm * 1e-3;
  return r;
}

json validation_to_json(const ValidationReport& r) {
  return {{"pass", r.pass},
          {"start_matches", r.start_matches},
          {"end_matches", r.end_matches},
          {"max_joint_speed_mps", r.max_joint_speed},
          {"max_joint_accel_mps2", r.max_joint_accel},
          {"max_penetration_mm", r.max_penetration_m * 1e3},
          {"penetration_mm", [&] {
             json a = json::array();
             for (double p : r.penetration_m) a.push_back(p * 1e3);
             return a;
           }()}};
}

json sequence_to_json(const PoseSequence& seq) {
  json frames = json::array();
  for (const auto& f : seq.frames) {
    frames.push_back({{"hand", hand_pose_to_json(f.hand)}, {"object", object_pose_to_json(f.object)}});
  }
  return {{"schema", 1}, {"fps", seq.fps}, {"frames", frames}};
}

PoseSequence sequence_from_json(const json& j) {
  try {
    if (!j.is_object() || !j.contains("schema") || j.at("schema").get<int>() != 1) {
      fail(ErrorCode::Schema, "pose sequence: missing or unsupported \"schema\" (expected 1)");
    }
    PoseSequence seq;
    seq.fps = j.at("fps").get<double>();
    if (!(seq.fps > 0.0)) fail(ErrorCode::Schema, "pose sequence: fps must be > 0");
    for (const auto& f : j.at("frames")) {
      seq.frames.push_back({hand_pose_from_json(f.at("hand")), object_pose_from_json(f.at("object"))});
    }
    if (seq.frames.size() < 2) fail(ErrorCode::Schema, "pose sequence: needs at least 2 frames");
    return seq;
  } catch (const json::exception& e) {
    fail(ErrorCode::Schema, std::string("pose sequence: ") + e.what());
  }
}

namespace {

json read_json_file(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, std::string("cannot open ") + what + " '" + path + "'");
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::exception& e) {
    fail(ErrorCode::Schema, path + ": " + e.what());
  }
}

}  // namespace

PoseSequence load_sequence(const std::string& path) {
  return sequence_from_json(read_json_file(path, "pose sequence"));
}

void save_sequence(const PoseSequence& seq, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::Io, "cannot write '" + path + "'");
  out << sequence_to_json(seq).dump() << '\n';
}

Endpoints endpoints_from_json(const json& j) {
  try {
    if (!j.is_object() || !j.contains("schema") || j.at("schema").get<int>() != 1) {
      fail(ErrorCode::Schema, "endpoints: missing or unsupported \"schema\" (expected 1)");
    }
    Endpoints e;
    e.hand_start = hand_pose_from_json(j.at("hand_start"));
    e.hand_end = hand_pose_from_json(j.at("hand_end"));
    e.object_start = object_pose_from_json(j.at("object_start"));
    if (j.contains("object_end") && !j.at("object_end").is_null()) {
      e.object_end = object_pose_from_json(j.at("object_end"));
    }
    return e;
  } catch (const json::exception& ex) {
    fail(ErrorCode::Schema, std::string("endpoints: ") + ex.what());
  }
}

json endpoints_to_json(const Endpoints& e) {
  json j = {{"schema", 1},
            {"hand_start", hand_pose_to_json(e.hand_start)},
            {"hand_end", hand_pose_to_json(e.hand_end)},
            {"object_start", object_pose_to_json(e.object_start)}};
  if (e.object_end) j["object_end"] = object_pose_to_json(*e.object_end);
  return j;
}

Endpoints load_endpoints(const std::string& path) {
  return endpoints_from_json(read_json_file(path, "endpoints"));
}

}  // namespace hoi
