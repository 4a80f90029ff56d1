#include "hand_geometry/hand_model.hpp"

#include "common/error.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <numbers>

namespace hoi {

using nlohmann::json;

std::array<int, kKeypointCount> canonical_parents() {
  std::array<int, kKeypointCount> p{};
  p[0] = -1;
  for (int f = 0; f < kFingerCount; ++f) {
    const int base = 1 + 4 * f;
    p[base] = 0;
    for (int s = 1; s < 4; ++s) p[base + s] = base + s - 1;
  }
  return p;
}

HandPose HandPose::from_scalars(std::span<const double> values) {
  if (values.size() != kPoseScalarCount) {
    fail(ErrorCode::Shape, "hand pose needs 51 scalars, got " + std::to_string(values.size()));
  }
  HandPose p;
  p.translation = Vec3(values[0], values[1], values[2]);
  for (int a = 0; a < kArticulatedCount; ++a) {
    p.rotations[a] = Vec3(values[3 + 3 * a], values[4 + 3 * a], values[5 + 3 * a]);
  }
  return p;
}

std::array<double, kPoseScalarCount> HandPose::to_scalars() const {
  std::array<double, kPoseScalarCount> out{};
  for (int i = 0; i < 3; ++i) out[i] = translation[i];
  for (int a = 0; a < kArticulatedCount; ++a) {
    for (int i = 0; i < 3; ++i) out[3 + 3 * a + i] = rotations[a][i];
  }
  return out;
}

bool HandPose::all_finite() const {
  if (!translation.allFinite()) return false;
  for (const auto& r : rotations) {
    if (!r.allFinite()) return false;
  }
  return true;
}

KinematicHand::KinematicHand(std::array<int, kKeypointCount> parents,
                             std::array<Vec3, kKeypointCount> template_joints,
                             TriMesh template_mesh,
                             std::vector<std::vector<SkinWeight>> skin_weights)
    : parents_(parents),
      template_joints_(template_joints),
      template_mesh_(std::move(template_mesh)),
      skin_weights_(std::move(skin_weights)) {
  if (parents_ != canonical_parents()) {
    fail(ErrorCode::Schema, "unsupported joint tree: expected the canonical 21-joint hand layout");
  }
  for (const auto& j : template_joints_) {
    if (!j.allFinite()) fail(ErrorCode::Schema, "non-finite template joint");
  }
  validate_mesh(template_mesh_);
  template_mesh_.instance_id = 1;
  if (skin_weights_.size() != template_mesh_.vertices.size()) {
    fail(ErrorCode::Schema, "skinning weights cover " + std::to_string(skin_weights_.size()) +
                                " vertices, mesh has " +
                                std::to_string(template_mesh_.vertices.size()));
  }
  for (std::size_t v = 0; v < skin_weights_.size(); ++v) {
    double sum = 0.0;
    if (skin_weights_[v].empty()) fail(ErrorCode::Schema, "vertex " + std::to_string(v) + " has no weights");
    for (const auto& w : skin_weights_[v]) {
      if (w.joint < 0 || w.joint >= kArticulatedCount) {
        fail(ErrorCode::Schema, "skin weight joint out of range at vertex " + std::to_string(v));
      }
      if (!(w.weight >= 0.0) || !std::isfinite(w.weight)) {
        fail(ErrorCode::Schema, "negative skin weight at vertex " + std::to_string(v));
      }
      sum += w.weight;
    }
    if (std::abs(sum - 1.0) > 1e-6) {
      fail(ErrorCode::Schema, "skin weights at vertex " + std::to_string(v) + " sum to " +
                                  std::to_string(sum));
    }
  }
  for (int f = 0; f < kFingerCount; ++f) {
    fingertip_offsets_[f] = template_joints_[fingertip_keypoint(f)] -
                            template_joints_[articulated_to_keypoint(distal_articulated(f))];
  }
}

std::array<std::array<int, 2>, kBoneCount> KinematicHand::bones() const {
  std::array<std::array<int, 2>, kBoneCount> out{};
  int b = 0;
  for (int k = 1; k < kKeypointCount; ++k) out[b++] = {parents_[k], k};
  return out;
}

RigidTransform wrist_transform(const Vec3& wrist, const HandPose& pose) {
  const Mat3 r = axis_angle_to_matrix(pose.rotations[0]);
  return {r, (wrist - r * wrist) + pose.translation};
}

std::array<RigidTransform, kArticulatedCount> joint_transforms(const KinematicHand& hand,
                                                               const HandPose& pose) {
  const auto& tj = hand.template_joints();
  std::array<RigidTransform, kArticulatedCount> g;
  g[0] = wrist_transform(tj[0], pose);
  // Articulated indices are ordered so every parent precedes its children.
  for (int a = 1; a < kArticulatedCount; ++a) {
    const int k = articulated_to_keypoint(a);
    const int parent_a = keypoint_to_articulated(hand.parents()[k]);
    const Mat3 r = axis_angle_to_matrix(pose.rotations[a]);
    const RigidTransform local{r, tj[k] - r * tj[k]};
    g[a] = g[parent_a].compose(local);
  }
  return g;
}

std::array<Vec3, kKeypointCount> forward_kinematics(const KinematicHand& hand, const HandPose& pose) {
  const auto g = joint_transforms(hand, pose);
  const auto& tj = hand.template_joints();
  std::array<Vec3, kKeypointCount> out;
  for (int k = 0; k < kKeypointCount; ++k) {
    const int a = keypoint_to_articulated(k);
    if (a >= 0) {
      out[k] = g[a].apply(tj[k]);
    } else {
      // The template tip is distal joint + fingertip offset; applying the
      // distal transform to it directly keeps the rest pose bit-exact.
      out[k] = g[distal_articulated((k - 1) / 4)].apply(tj[k]);
    }
  }
  return out;
}

TriMesh skin_mesh(const KinematicHand& hand, const HandPose& pose) {
  const auto g = joint_transforms(hand, pose);
  TriMesh out = hand.template_mesh();
  const auto& weights = hand.skin_weights();
  for (std::size_t v = 0; v < out.vertices.size(); ++v) {
    const Vec3 rest = hand.template_mesh().vertices[v];
    // Blending displacements keeps the identity pose bit-exact.
    Vec3 delta = Vec3::Zero();
    for (const auto& w : weights[v]) delta += w.weight * (g[w.joint].apply(rest) - rest);
    out.vertices[v] = rest + delta;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Procedural template.

namespace {

struct FingerSpec {
  std::array<Vec3, 4> joints;  // three articulated joints + tip
  double radius;
};

std::array<FingerSpec, kFingerCount> finger_specs() {
  return {{
      {{Vec3(0.020, 0.025, 0.0), Vec3(0.040, 0.050, 0.0), Vec3(0.055, 0.075, 0.0), Vec3(0.065, 0.095, 0.0)}, 0.0095},
      {{Vec3(0.025, 0.090, 0.0), Vec3(0.027, 0.130, 0.0), Vec3(0.028, 0.155, 0.0), Vec3(0.029, 0.175, 0.0)}, 0.0085},
      {{Vec3(0.005, 0.095, 0.0), Vec3(0.005, 0.140, 0.0), Vec3(0.005, 0.168, 0.0), Vec3(0.005, 0.190, 0.0)}, 0.0088},
      {{Vec3(-0.015, 0.090, 0.0), Vec3(-0.016, 0.130, 0.0), Vec3(-0.017, 0.156, 0.0), Vec3(-0.018, 0.176, 0.0)}, 0.0082},
      {{Vec3(-0.033, 0.080, 0.0), Vec3(-0.036, 0.110, 0.0), Vec3(-0.038, 0.128, 0.0), Vec3(-0.040, 0.145, 0.0)}, 0.0072},
  }};
}

void add_grid_face(TriMesh& mesh, std::vector<std::vector<SkinWeight>>& weights, const Vec3& origin,
                   const Vec3& du, const Vec3& dv, int nu, int nv) {
  const auto base = static_cast<std::uint32_t>(mesh.vertices.size());
  for (int j = 0; j <= nv; ++j) {
    for (int i = 0; i <= nu; ++i) {
      mesh.vertices.push_back(origin + du * (double(i) / nu) + dv * (double(j) / nv));
      weights.push_back({{0, 1.0}});
    }
  }
  auto at = [&](int i, int j) { return base + static_cast<std::uint32_t>(j * (nu + 1) + i); };
  for (int j = 0; j < nv; ++j) {
    for (int i = 0; i < nu; ++i) {
      mesh.faces.push_back({at(i, j), at(i + 1, j), at(i + 1, j + 1)});
      mesh.faces.push_back({at(i, j), at(i + 1, j + 1), at(i, j + 1)});
    }
  }
}

void add_palm(TriMesh& mesh, std::vector<std::vector<SkinWeight>>& weights) {
  const Vec3 lo(-0.045, -0.010, -0.013);
  const Vec3 hi(0.040, 0.085, 0.013);
  const Vec3 ex(hi.x() - lo.x(), 0, 0), ey(0, hi.y() - lo.y(), 0), ez(0, 0, hi.z() - lo.z());
  add_grid_face(mesh, weights, lo, ey, ex, 6, 6);        // -z
  add_grid_face(mesh, weights, lo + ez, ex, ey, 6, 6);   // +z
  add_grid_face(mesh, weights, lo, ex, ez, 6, 2);        // -y
  add_grid_face(mesh, weights, lo + ey, ez, ex, 2, 6);   // +y
  add_grid_face(mesh, weights, lo, ez, ey, 2, 6);        // -x
  add_grid_face(mesh, weights, lo + ex, ey, ez, 6, 2);   // +x
}

void add_segment_tube(TriMesh& mesh, std::vector<std::vector<SkinWeight>>& weights, const Vec3& p0,
                      const Vec3& p1, double radius, int joint, int parent_joint) {
  constexpr int kAround = 8;
  constexpr int kRings = 5;
  const Vec3 axis = (p1 - p0).normalized();
  const Vec3 e1 = axis.cross(Vec3::UnitZ()).normalized();
  const Vec3 e2 = axis.cross(e1);
  const auto base = static_cast<std::uint32_t>(mesh.vertices.size());

  auto ring_weights = [&](double u) -> std::vector<SkinWeight> {
    const double w = std::min(1.0, 0.5 + 1.25 * u);
    if (w >= 1.0) return {{joint, 1.0}};
    return {{joint, w}, {parent_joint, 1.0 - w}};
  };

  for (int r = 0; r < kRings; ++r) {
    const double u = double(r) / (kRings - 1);
    const Vec3 c = p0 + (p1 - p0) * u;
    for (int i = 0; i < kAround; ++i) {
      const double phi = 2.0 * std::numbers::pi * i / kAround;
      mesh.vertices.push_back(c + radius * (std::cos(phi) * e1 + std::sin(phi) * e2));
      weights.push_back(ring_weights(u));
    }
  }
  const auto start_cap = static_cast<std::uint32_t>(mesh.vertices.size());
  mesh.vertices.push_back(p0 - 0.5 * radius * axis);
  weights.push_back(ring_weights(0.0));
  const auto end_cap = static_cast<std::uint32_t>(mesh.vertices.size());
  mesh.vertices.push_back(p1 + 0.5 * radius * axis);
  weights.push_back({{joint, 1.0}});

  auto at = [&](int r, int i) { return base + static_cast<std::uint32_t>(r * kAround + (i % kAround)); };
  for (int r = 0; r + 1 < kRings; ++r) {
    for (int i = 0; i < kAround; ++i) {
      mesh.faces.push_back({at(r, i), at(r, i + 1), at(r + 1, i + 1)});
      mesh.faces.push_back({at(r, i), at(r + 1, i + 1), at(r + 1, i)});
    }
  }
  for (int i = 0; i < kAround; ++i) {
    mesh.faces.push_back({start_cap, at(0, i + 1), at(0, i)});
    mesh.faces.push_back({end_cap, at(kRings - 1, i), at(kRings - 1, i + 1)});
  }
}

}  // namespace

KinematicHand make_default_hand() {
  std::array<Vec3, kKeypointCount> joints;
  joints[0] = Vec3::Zero();
  const auto fingers = finger_specs();
  for (int f = 0; f < kFingerCount; ++f) {
    for (int s = 0; s < 4; ++s) joints[1 + 4 * f + s] = fingers[f].joints[s];
  }

  TriMesh mesh;
  mesh.instance_id = 1;
  std::vector<std::vector<SkinWeight>> weights;
  add_palm(mesh, weights);
  for (int f = 0; f < kFingerCount; ++f) {
    for (int s = 0; s < 3; ++s) {
      const int a = 1 + 3 * f + s;
      const int parent = s == 0 ? 0 : a - 1;
      const double r = fingers[f].radius * (1.0 - 0.08 * s);
      add_segment_tube(mesh, weights, fingers[f].joints[s], fingers[f].joints[s + 1], r, a, parent);
    }
  }
  return KinematicHand(canonical_parents(), joints, std::move(mesh), std::move(weights));
}

// ---------------------------------------------------------------------------
// JSON.

namespace {

json vec_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) fail(ErrorCode::Schema, std::string(what) + ": expected [x, y, z]");
  Vec3 v;
  for (int i = 0; i < 3; ++i) {
    if (!j[i].is_number()) fail(ErrorCode::Schema, std::string(what) + ": expected numbers");
    v[i] = j[i].get<double>();
  }
  return v;
}

const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) fail(ErrorCode::Schema, std::string("missing field '") + key + "'");
  return j.at(key);
}

}  // namespace

json hand_to_json(const KinematicHand& hand) {
  json j;
  j["schema"] = 1;
  j["parents"] = hand.parents();
  json joints = json::array();
  for (const auto& p : hand.template_joints()) joints.push_back(vec_to_json(p));
  j["template_joints"] = joints;
  json tips = json::array();
  for (const auto& p : hand.fingertip_offsets()) tips.push_back(vec_to_json(p));
  j["fingertip_offsets"] = tips;
  json verts = json::array();
  for (const auto& v : hand.template_mesh().vertices) verts.push_back(vec_to_json(v));
  json faces = json::array();
  for (const auto& f : hand.template_mesh().faces) faces.push_back({f[0], f[1], f[2]});
  j["mesh"] = {{"vertices", verts}, {"faces", faces}};
  json weights = json::array();
  for (const auto& vw : hand.skin_weights()) {
    json entry = json::array();
    for (const auto& w : vw) entry.push_back({w.joint, w.weight});
    weights.push_back(entry);
  }
  j["skin_weights"] = weights;
  return j;
}

KinematicHand hand_from_json(const json& j) {
  try {
    if (require(j, "schema").get<int>() != 1) fail(ErrorCode::Schema, "unsupported hand schema version");
    const auto parents_vec = require(j, "parents").get<std::vector<int>>();
    if (parents_vec.size() != kKeypointCount) fail(ErrorCode::Schema, "parents must have 21 entries");
    std::array<int, kKeypointCount> parents{};
    std::copy(parents_vec.begin(), parents_vec.end(), parents.begin());

    const auto& jj = require(j, "template_joints");
    if (!jj.is_array() || jj.size() != kKeypointCount) fail(ErrorCode::Schema, "template_joints must have 21 entries");
    std::array<Vec3, kKeypointCount> joints;
    for (int k = 0; k < kKeypointCount; ++k) joints[k] = vec_from_json(jj[k], "template_joints");

    const auto& jm = require(j, "mesh");
    TriMesh mesh;
    mesh.instance_id = 1;
    for (const auto& v : require(jm, "vertices")) mesh.vertices.push_back(vec_from_json(v, "mesh.vertices"));
    for (const auto& f : require(jm, "faces")) {
      const auto idx = f.get<std::vector<std::uint32_t>>();
      if (idx.size() != 3) fail(ErrorCode::Schema, "mesh.faces entries must be triangles");
      mesh.faces.push_back({idx[0], idx[1], idx[2]});
    }

    std::vector<std::vector<SkinWeight>> weights;
    for (const auto& vw : require(j, "skin_weights")) {
      std::vector<SkinWeight> entry;
      for (const auto& w : vw) {
        if (!w.is_array() || w.size() != 2) fail(ErrorCode::Schema, "skin weight entries are [joint, weight]");
        entry.push_back({w[0].get<int>(), w[1].get<double>()});
      }
      weights.push_back(std::move(entry));
    }

    KinematicHand hand(parents, joints, std::move(mesh), std::move(weights));
    if (j.contains("fingertip_offsets")) {
      const auto& jt = j.at("fingertip_offsets");
      if (!jt.is_array() || jt.size() != kFingerCount) fail(ErrorCode::Schema, "fingertip_offsets must have 5 entries");
      for (int f = 0; f < kFingerCount; ++f) {
        if ((vec_from_json(jt[f], "fingertip_offsets") - hand.fingertip_offsets()[f]).norm() > 1e-9) {
          fail(ErrorCode::Schema, "fingertip_offsets disagree with template joints");
        }
      }
    }
    return hand;
  } catch (const json::exception& e) {
    fail(ErrorCode::Schema, std::string("hand model: ") + e.what());
  }
}

KinematicHand load_hand(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open hand model '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail(ErrorCode::Schema, path + ": " + e.what());
  }
  return hand_from_json(j);
}

void save_hand(const KinematicHand& hand, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::Io, "cannot write '" + path + "'");
  out << hand_to_json(hand).dump() << '\n';
}

json hand_pose_to_json(const HandPose& pose) {
  json rots = json::array();
  for (const auto& r : pose.rotations) rots.push_back(vec_to_json(r));
  return {{"trans", vec_to_json(pose.translation)}, {"rots", rots}};
}

HandPose hand_pose_from_json(const json& j) {
  HandPose p;
  p.translation = vec_from_json(require(j, "trans"), "hand.trans");
  const auto& rots = require(j, "rots");
  if (!rots.is_array() || rots.size() != kArticulatedCount) {
    fail(ErrorCode::Schema, "hand.rots must hold 16 axis-angle vectors");
  }
  for (int a = 0; a < kArticulatedCount; ++a) p.rotations[a] = vec_from_json(rots[a], "hand.rots");
  if (!p.all_finite()) fail(ErrorCode::Schema, "hand pose has non-finite values");
  return p;
}

json object_pose_to_json(const ObjectPose& pose) {
  return {{"rot", vec_to_json(pose.rotation)}, {"trans", vec_to_json(pose.translation)}};
}

ObjectPose object_pose_from_json(const json& j) {
  ObjectPose p;
  p.rotation = vec_from_json(require(j, "rot"), "object.rot");
  p.translation = vec_from_json(require(j, "trans"), "object.trans");
  if (!p.rotation.allFinite() || !p.translation.allFinite()) {
    fail(ErrorCode::Schema, "object pose has non-finite values");
  }
  return p;
}

}  // namespace hoi
