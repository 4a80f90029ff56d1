#pragma once

#include "pipeline/config.hpp"
#include "pipeline/manifest.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hoi {

inline constexpr int kReportSchema = 1;

struct ClipMetrics {
  std::string id;
  std::optional<double> mf;
  std::optional<double> psnr;  // mean over frames
  std::optional<double> ssim;
  std::optional<double> mpjpe_mm;
  std::optional<double> pa_mpjpe_mm;
  std::optional<double> pa_mpvpe_mm;
  std::map<std::string, double> fscore_at;  // threshold label -> mean over frames
  int image_frames = 0;
  int joint_frames = 0;
  int vertex_frames = 0;
  int tracks = 0;
  std::vector<std::string> skipped;
};

struct MetricsReport {
  std::optional<double> fvd_core;  // features pooled over all clips
  std::optional<double> mf;        // the rest: mean of the per-clip values
  std::optional<double> psnr;
  std::optional<double> ssim;
  std::optional<double> mpjpe_mm;
  std::optional<double> pa_mpjpe_mm;
  std::optional<double> pa_mpvpe_mm;
  std::map<std::string, double> fscore_at;
  int clips = 0;
  int frames = 0;
  int tracks = 0;
  std::vector<std::string> skipped;  // metrics with no usable inputs in any clip
  std::vector<ClipMetrics> per_clip;
};

// "5" for 5.0, "2.5" for 2.5.
std::string threshold_label(double threshold_mm);

// Metrics run only where both sides of their inputs are present. Missing
// inputs are recorded, never fatal; unreadable or inconsistent files are.
ClipMetrics evaluate_clip(const ClipRecord& clip, const PipelineConfig& cfg);
MetricsReport evaluate_manifest(const ClipManifest& manifest, const PipelineConfig& cfg, int jobs = 1);

nlohmann::json report_to_json(const MetricsReport& report);
// id, then one column per metric; empty cells where a metric was skipped.
std::string per_clip_csv(const MetricsReport& report, const PipelineConfig& cfg);

}  // namespace hoi
