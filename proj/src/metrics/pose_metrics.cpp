#include "metrics/pose_metrics.hpp"

#include "common/error.hpp"

#include <Eigen/SVD>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

namespace hoi {

using nlohmann::json;

void JointSet::validate() const {
  if (points.size() != 21) fail(ErrorCode::Shape, "joint set needs 21 points, got " + std::to_string(points.size()));
  for (const auto& p : points) {
    if (!p.allFinite()) fail(ErrorCode::Shape, "joint set has non-finite values");
  }
}

double mpjpe_root_aligned(const JointSet& pred, const JointSet& gt) {
  pred.validate();
  gt.validate();
  std::vector<double> d(pred.points.size());
  for (std::size_t k = 0; k < d.size(); ++k) {
    d[k] = ((pred.points[k] - pred.points[0]) - (gt.points[k] - gt.points[0])).norm();
  }
  return pairwise_mean(d);
}

Similarity procrustes_align(std::span<const Vec3> source, std::span<const Vec3> target, bool with_scale) {
  if (source.size() != target.size()) fail(ErrorCode::Shape, "Procrustes needs equal point counts");
  const std::size_t n = source.size();
  if (n < 3) fail(ErrorCode::Degenerate, "Procrustes needs at least 3 points");

  Vec3 mu_x = Vec3::Zero(), mu_y = Vec3::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    mu_x += source[i];
    mu_y += target[i];
  }
  mu_x /= static_cast<double>(n);
  mu_y /= static_cast<double>(n);

  Mat3 cov = Mat3::Zero();
  double var_x = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 dx = source[i] - mu_x;
    cov += (target[i] - mu_y) * dx.transpose();
    var_x += dx.squaredNorm();
  }
  cov /= static_cast<double>(n);
  var_x /= static_cast<double>(n);
  if (!(var_x > std::numeric_limits<double>::min())) {
    fail(ErrorCode::Degenerate, "Procrustes source points all coincide");
  }

  Eigen::JacobiSVD<Mat3> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Mat3& u = svd.matrixU();
  const Mat3& v = svd.matrixV();
  Vec3 s_diag(1.0, 1.0, (u * v.transpose()).determinant() < 0.0 ? -1.0 : 1.0);

  Similarity out;
  out.rotation = u * s_diag.asDiagonal() * v.transpose();
  out.scale = with_scale ? svd.singularValues().dot(s_diag) / var_x : 1.0;
  out.translation = mu_y - out.scale * (out.rotation * mu_x);
  return out;
}

double pa_mean_error(std::span<const Vec3> pred, std::span<const Vec3> gt) {
  const Similarity s = procrustes_align(pred, gt, true);
  std::vector<double> d(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) d[i] = (s.apply(pred[i]) - gt[i]).norm();
  return pairwise_mean(d);
}

double pa_mpjpe(const JointSet& pred, const JointSet& gt) {
  pred.validate();
  gt.validate();
  return pa_mean_error(pred.points, gt.points);
}

double pa_mpvpe(std::span<const Vec3> pred_vertices, std::span<const Vec3> gt_vertices) {
  return pa_mean_error(pred_vertices, gt_vertices);
}

namespace {

double fraction_within(std::span<const Vec3> from, std::span<const Vec3> to, double threshold) {
  const double limit = threshold * threshold;
  std::size_t hits = 0;
  for (const auto& p : from) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : to) best = std::min(best, (p - q).squaredNorm());
    if (best <= limit) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(from.size());
}

}  // namespace

double fscore(std::span<const Vec3> pred, std::span<const Vec3> gt, double threshold_mm) {
  if (pred.empty() || gt.empty()) fail(ErrorCode::EmptySet, "F-score needs nonempty point sets");
  const double precision = fraction_within(pred, gt, threshold_mm);
  const double recall = fraction_within(gt, pred, threshold_mm);
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

std::vector<std::string> rank_and_filter(std::span<const Candidate> candidates, double discard_fraction) {
  if (!(discard_fraction >= 0.0 && discard_fraction < 1.0)) {
    fail(ErrorCode::InvalidArgument, "discard fraction must lie in [0, 1)");
  }
  std::vector<Candidate> ranked(candidates.begin(), candidates.end());
  std::sort(ranked.begin(), ranked.end(), [](const Candidate& a, const Candidate& b) {
    if (a.pose_error_mm != b.pose_error_mm) return a.pose_error_mm < b.pose_error_mm;
    return a.id < b.id;
  });
  // The small slack keeps products like 0.29 * 100 from rounding below an
  // integer they equal exactly in decimal.
  const auto discard = static_cast<std::size_t>(
      std::floor(static_cast<double>(ranked.size()) * discard_fraction + 1e-9));
  std::vector<std::string> kept;
  for (std::size_t i = 0; i + discard < ranked.size(); ++i) kept.push_back(ranked[i].id);
  return kept;
}

std::vector<std::vector<Vec3>> load_point_frames(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open point file '" + path + "'");
  try {
    json j;
    in >> j;
    const std::string units = j.value("units", std::string("mm"));
    double to_mm = 1.0;
    if (units == "m") {
      to_mm = 1000.0;
    } else if (units != "mm") {
      fail(ErrorCode::Schema, path + ": units must be \"mm\" or \"m\"");
    }
    auto parse_set = [&](const json& arr) {
      std::vector<Vec3> pts;
      for (const auto& p : arr) {
        if (!p.is_array() || p.size() != 3) fail(ErrorCode::Schema, path + ": points are [x, y, z]");
        pts.emplace_back(p[0].get<double>() * to_mm, p[1].get<double>() * to_mm, p[2].get<double>() * to_mm);
      }
      return pts;
    };
    std::vector<std::vector<Vec3>> frames;
    if (j.contains("frames")) {
      for (const auto& f : j.at("frames")) frames.push_back(parse_set(f));
    } else {
      frames.push_back(parse_set(j.at("points")));
    }
    return frames;
  } catch (const json::exception& e) {
    fail(ErrorCode::Schema, path + ": " + e.what());
  }
}

json point_frames_to_json(const std::vector<std::vector<Vec3>>& frames) {
  json arr = json::array();
  for (const auto& f : frames) {
    json pts = json::array();
    for (const auto& p : f) pts.push_back({p.x(), p.y(), p.z()});
    arr.push_back(pts);
  }
  return {{"units", "mm"}, {"frames", arr}};
}

}  // namespace hoi
