#pragma once

#include "common/math.hpp"

#include <nlohmann/json_fwd.hpp>

#include <span>
#include <string>
#include <vector>

namespace hoi {

enum class JointRole { Predicted, GroundTruth };

// 21 hand joints in millimeters.
struct JointSet {
  std::vector<Vec3> points;
  JointRole role = JointRole::Predicted;

  // Throws Shape unless exactly 21 finite points.
  void validate() const;
};

// Wrist (joint 0) subtracted from both sets, then mean joint distance (mm).
double mpjpe_root_aligned(const JointSet& pred, const JointSet& gt);

struct Similarity {
  double scale = 1.0;
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 apply(const Vec3& x) const { return scale * (rotation * x) + translation; }
};

// Closed-form least-squares similarity (Umeyama) mapping source onto target.
// With with_scale = false the scale is fixed at 1. Throws Shape on count
// mismatch and Degenerate when N < 3 or all source points coincide.
Similarity procrustes_align(std::span<const Vec3> source, std::span<const Vec3> target, bool with_scale);

// Mean point distance after aligning pred onto gt with a similarity.
double pa_mean_error(std::span<const Vec3> pred, std::span<const Vec3> gt);
double pa_mpjpe(const JointSet& pred, const JointSet& gt);
double pa_mpvpe(std::span<const Vec3> pred_vertices, std::span<const Vec3> gt_vertices);

// Harmonic mean of precision (pred within threshold of some gt point) and
// recall (the converse). 0 when both are 0.
double fscore(std::span<const Vec3> pred, std::span<const Vec3> gt, double threshold_mm);

struct Candidate {
  std::string id;
  double pose_error_mm = 0.0;
};

// Sorted by (error, id) ascending, the floor(n * discard_fraction) largest
// errors removed; returns the kept ids in that order.
std::vector<std::string> rank_and_filter(std::span<const Candidate> candidates, double discard_fraction);

// Point files: {"units": "mm" | "m", "points": [[x, y, z]...]} or
// {"units", "frames": [[[x, y, z]...]...]}. Values are returned in mm.
std::vector<std::vector<Vec3>> load_point_frames(const std::string& path);
nlohmann::json point_frames_to_json(const std::vector<std::vector<Vec3>>& frames);

}  // namespace hoi
