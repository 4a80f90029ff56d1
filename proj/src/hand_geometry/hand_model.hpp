#pragma once

#include "common/math.hpp"
#include "hand_geometry/mesh.hpp"

#include <nlohmann/json_fwd.hpp>

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace hoi {

inline constexpr int kKeypointCount = 21;
inline constexpr int kArticulatedCount = 16;
inline constexpr int kFingerCount = 5;
inline constexpr int kBoneCount = 20;
inline constexpr int kPoseScalarCount = 3 + 3 * kArticulatedCount;  // 51

// Keypoint layout (21):
//   0 wrist, then per finger f in {thumb, index, middle, ring, pinky}
//   1+4f .. 3+4f the three articulated joints, 4+4f the fingertip.
// Articulated layout (16): 0 wrist, 1+3f+s for segment s of finger f.
constexpr int articulated_to_keypoint(int a) {
  return a == 0 ? 0 : 1 + 4 * ((a - 1) / 3) + (a - 1) % 3;
}
// -1 for fingertips, which carry no rotation of their own.
constexpr int keypoint_to_articulated(int k) {
  if (k == 0) return 0;
  const int f = (k - 1) / 4;
  const int s = (k - 1) % 4;
  return s == 3 ? -1 : 1 + 3 * f + s;
}
constexpr int fingertip_keypoint(int finger) { return 4 + 4 * finger; }
constexpr int distal_articulated(int finger) { return 3 + 3 * finger; }

std::array<int, kKeypointCount> canonical_parents();

// 51 scalars: translation followed by 16 axis-angle rotations, index 0 being
// the global wrist rotation.
struct HandPose {
  Vec3 translation = Vec3::Zero();
  std::array<Vec3, kArticulatedCount> rotations;

  HandPose() { rotations.fill(Vec3::Zero()); }

  static HandPose from_scalars(std::span<const double> values);
  std::array<double, kPoseScalarCount> to_scalars() const;
  bool all_finite() const;

  bool operator==(const HandPose& o) const {
    return translation == o.translation && rotations == o.rotations;
  }
};

struct SkinWeight {
  int joint = 0;  // articulated index
  double weight = 0.0;
};

class KinematicHand {
 public:
  // Throws Schema when the tree is not the canonical 21-joint layout or the
  // skinning weights are invalid.
  KinematicHand(std::array<int, kKeypointCount> parents,
                std::array<Vec3, kKeypointCount> template_joints,
                TriMesh template_mesh,
                std::vector<std::vector<SkinWeight>> skin_weights);

  const std::array<int, kKeypointCount>& parents() const { return parents_; }
  const std::array<Vec3, kKeypointCount>& template_joints() const { return template_joints_; }
  const TriMesh& template_mesh() const { return template_mesh_; }
  const std::vector<std::vector<SkinWeight>>& skin_weights() const { return skin_weights_; }
  const std::array<Vec3, kFingerCount>& fingertip_offsets() const { return fingertip_offsets_; }

  const Vec3& wrist() const { return template_joints_[0]; }

  // Bones as (parent, child) keypoint pairs, 20 entries.
  std::array<std::array<int, 2>, kBoneCount> bones() const;

 private:
  std::array<int, kKeypointCount> parents_;
  std::array<Vec3, kKeypointCount> template_joints_;
  TriMesh template_mesh_;
  std::vector<std::vector<SkinWeight>> skin_weights_;
  std::array<Vec3, kFingerCount> fingertip_offsets_;
};

// Rest-relative world transforms of the 16 articulated joints: a point on the
// template attached rigidly to joint a maps to transforms[a].apply(point).
std::array<RigidTransform, kArticulatedCount> joint_transforms(const KinematicHand& hand,
                                                               const HandPose& pose);

// The wrist's rigid transform alone (global rotation about the template
// wrist, then translation).
RigidTransform wrist_transform(const Vec3& wrist, const HandPose& pose);

std::array<Vec3, kKeypointCount> forward_kinematics(const KinematicHand& hand, const HandPose& pose);

// Linear blend skinning. Instance id of the result is 1 (hand label).
TriMesh skin_mesh(const KinematicHand& hand, const HandPose& pose);

// The bundled low-poly procedural hand (~800 vertices).
KinematicHand make_default_hand();

nlohmann::json hand_to_json(const KinematicHand& hand);
KinematicHand hand_from_json(const nlohmann::json& j);
KinematicHand load_hand(const std::string& path);
void save_hand(const KinematicHand& hand, const std::string& path);

nlohmann::json hand_pose_to_json(const HandPose& pose);
HandPose hand_pose_from_json(const nlohmann::json& j);
nlohmann::json object_pose_to_json(const ObjectPose& pose);
ObjectPose object_pose_from_json(const nlohmann::json& j);

}  // namespace hoi
