#include "pipeline/report.hpp"

#include "common/error.hpp"
#include "common/math.hpp"
#include "common/parallel.hpp"
#include "metrics/frechet.hpp"
#include "metrics/image_metrics.hpp"
#include "metrics/motion.hpp"
#include "metrics/pose_metrics.hpp"
#include "pipeline/files.hpp"
#include "raster/image_io.hpp"
#include "raster/tracklets.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace hoi {

std::string threshold_label(double threshold_mm) {
  char buf[64];
  if (threshold_mm == std::floor(threshold_mm) && std::abs(threshold_mm) < 1e15) {
    std::snprintf(buf, sizeof buf, "%.0f", threshold_mm);
  } else {
    std::snprintf(buf, sizeof buf, "%g", threshold_mm);
  }
  return buf;
}

namespace {

void evaluate_images(const ClipRecord& clip, ClipMetrics& m) {
  const auto gen = list_frame_files(*clip.generated_frames, ".png");
  const auto ref = list_frame_files(*clip.reference_frames, ".png");
  if (gen.size() != ref.size()) {
    fail(ErrorCode::LengthMismatch, "clip '" + clip.id + "': " + std::to_string(gen.size()) +
                                        " generated frames vs " + std::to_string(ref.size()) +
                                        " reference frames");
  }
  if (gen.empty()) {
    m.skipped.push_back("psnr");
    m.skipped.push_back("ssim");
    return;
  }
  std::vector<double> p(gen.size()), s(gen.size());
  for (std::size_t i = 0; i < gen.size(); ++i) {
    const Image8 a = read_png8(gen[i]);
    const Image8 b = read_png8(ref[i]);
    if (!a.same_shape(b)) fail(ErrorCode::Shape, gen[i] + " and " + ref[i] + " differ in shape");
    p[i] = psnr(a, b);
    s[i] = ssim(a, b);
  }
  m.psnr = pairwise_mean(p);
  m.ssim = pairwise_mean(s);
  m.image_frames = static_cast<int>(gen.size());
}

void evaluate_joints(const ClipRecord& clip, ClipMetrics& m) {
  const auto pred = load_point_frames(*clip.pred_joints);
  const auto gt = load_point_frames(*clip.gt_joints);
  if (pred.size() != gt.size()) {
    fail(ErrorCode::LengthMismatch, "clip '" + clip.id + "': joint files differ in frame count");
  }
  std::vector<double> e(pred.size()), pa(pred.size());
  for (std::size_t f = 0; f < pred.size(); ++f) {
    const JointSet p{pred[f], JointRole::Predicted};
    const JointSet g{gt[f], JointRole::GroundTruth};
    e[f] = mpjpe_root_aligned(p, g);
    pa[f] = pa_mpjpe(p, g);
  }
  if (pred.empty()) {
    m.skipped.push_back("mpjpe_mm");
    m.skipped.push_back("pa_mpjpe_mm");
    return;
  }
  m.mpjpe_mm = pairwise_mean(e);
  m.pa_mpjpe_mm = pairwise_mean(pa);
  m.joint_frames = static_cast<int>(pred.size());
}

void evaluate_vertices(const ClipRecord& clip, const PipelineConfig& cfg, ClipMetrics& m) {
  const auto pred = load_point_frames(*clip.pred_vertices);
  const auto gt = load_point_frames(*clip.gt_vertices);
  if (pred.size() != gt.size()) {
    fail(ErrorCode::LengthMismatch, "clip '" + clip.id + "': vertex files differ in frame count");
  }
  if (pred.empty()) {
    m.skipped.push_back("pa_mpvpe_mm");
    m.skipped.push_back("fscore_at");
    return;
  }
  std::vector<double> pv(pred.size());
  std::vector<std::vector<double>> fs(cfg.fscore_thresholds_mm.size(), std::vector<double>(pred.size()));
  for (std::size_t f = 0; f < pred.size(); ++f) {
    if (pred[f].size() != gt[f].size()) {
      fail(ErrorCode::Shape, "clip '" + clip.id + "': vertex counts differ in frame " + std::to_string(f));
    }
    // F-scores are taken after the same similarity alignment as PA-MPVPE.
    const Similarity sim = procrustes_align(pred[f], gt[f], true);
    std::vector<Vec3> aligned(pred[f].size());
    std::vector<double> dist(pred[f].size());
    for (std::size_t i = 0; i < aligned.size(); ++i) {
      aligned[i] = sim.apply(pred[f][i]);
      dist[i] = (aligned[i] - gt[f][i]).norm();
    }
    pv[f] = pairwise_mean(dist);
    for (std::size_t t = 0; t < fs.size(); ++t) fs[t][f] = fscore(aligned, gt[f], cfg.fscore_thresholds_mm[t]);
  }
  m.pa_mpvpe_mm = pairwise_mean(pv);
  for (std::size_t t = 0; t < fs.size(); ++t) {
    m.fscore_at[threshold_label(cfg.fscore_thresholds_mm[t])] = pairwise_mean(fs[t]);
  }
  m.vertex_frames = static_cast<int>(pred.size());
}

std::optional<double> mean_of(const std::vector<ClipMetrics>& clips,
                              std::optional<double> ClipMetrics::*member) {
  std::vector<double> v;
  for (const auto& c : clips) {
    if (c.*member) v.push_back(*(c.*member));
  }
  if (v.empty()) return std::nullopt;
  return pairwise_mean(v);
}

void put(nlohmann::json& j, const char* key, const std::optional<double>& v) {
  if (v) j[key] = *v;
}

}  // namespace

ClipMetrics evaluate_clip(const ClipRecord& clip, const PipelineConfig& cfg) {
  ClipMetrics m;
  m.id = clip.id;

  if (clip.gt_tracklets && clip.gen_tracklets) {
    const auto gt = load_tracklets(*clip.gt_tracklets);
    const auto gen = load_tracklets(*clip.gen_tracklets);
    if (gt.empty() || gen.empty()) {
      m.skipped.push_back("mf");
    } else {
      m.mf = motion_fidelity(gt, gen, cfg.mf_epsilon);
      m.tracks = static_cast<int>(gen.size());
    }
  } else {
    m.skipped.push_back("mf");
  }

  if (clip.generated_frames && clip.reference_frames) {
    evaluate_images(clip, m);
  } else {
    m.skipped.push_back("psnr");
    m.skipped.push_back("ssim");
  }

  if (clip.gt_joints && clip.pred_joints) {
    evaluate_joints(clip, m);
  } else {
    m.skipped.push_back("mpjpe_mm");
    m.skipped.push_back("pa_mpjpe_mm");
  }

  if (clip.gt_vertices && clip.pred_vertices) {
    evaluate_vertices(clip, cfg, m);
  } else {
    m.skipped.push_back("pa_mpvpe_mm");
    m.skipped.push_back("fscore_at");
  }
  return m;
}

MetricsReport evaluate_manifest(const ClipManifest& manifest, const PipelineConfig& cfg, int jobs) {
  MetricsReport r;
  r.clips = static_cast<int>(manifest.clips.size());
  r.per_clip.resize(manifest.clips.size());
  parallel_for(manifest.clips.size(), jobs,
               [&](std::size_t i) { r.per_clip[i] = evaluate_clip(manifest.clips[i], cfg); });

  r.mf = mean_of(r.per_clip, &ClipMetrics::mf);
  r.psnr = mean_of(r.per_clip, &ClipMetrics::psnr);
  r.ssim = mean_of(r.per_clip, &ClipMetrics::ssim);
  r.mpjpe_mm = mean_of(r.per_clip, &ClipMetrics::mpjpe_mm);
  r.pa_mpjpe_mm = mean_of(r.per_clip, &ClipMetrics::pa_mpjpe_mm);
  r.pa_mpvpe_mm = mean_of(r.per_clip, &ClipMetrics::pa_mpvpe_mm);
  for (double t : cfg.fscore_thresholds_mm) {
    const std::string label = threshold_label(t);
    std::vector<double> v;
    for (const auto& c : r.per_clip) {
      if (auto it = c.fscore_at.find(label); it != c.fscore_at.end()) v.push_back(it->second);
    }
    if (!v.empty()) r.fscore_at[label] = pairwise_mean(v);
  }
  for (const auto& c : r.per_clip) {
    r.frames += c.image_frames;
    r.tracks += c.tracks;
  }

  // Feature rows from every clip that has both sides go into one pool each.
  std::vector<Eigen::MatrixXd> gt_parts, gen_parts;
  for (const auto& clip : manifest.clips) {
    if (!clip.gt_features || !clip.gen_features) continue;
    gt_parts.push_back(load_feature_matrix(*clip.gt_features));
    gen_parts.push_back(load_feature_matrix(*clip.gen_features));
  }
  if (!gt_parts.empty()) {
    const auto d = gt_parts.front().cols();
    Eigen::Index gt_rows = 0, gen_rows = 0;
    for (std::size_t i = 0; i < gt_parts.size(); ++i) {
      if (gt_parts[i].cols() != d || gen_parts[i].cols() != d) {
        fail(ErrorCode::Shape, "feature matrices differ in dimension across the manifest");
      }
      gt_rows += gt_parts[i].rows();
      gen_rows += gen_parts[i].rows();
    }
    Eigen::MatrixXd gt(gt_rows, d), gen(gen_rows, d);
    Eigen::Index a = 0, b = 0;
    for (std::size_t i = 0; i < gt_parts.size(); ++i) {
      gt.middleRows(a, gt_parts[i].rows()) = gt_parts[i];
      gen.middleRows(b, gen_parts[i].rows()) = gen_parts[i];
      a += gt_parts[i].rows();
      b += gen_parts[i].rows();
    }
    r.fvd_core = frechet_distance(feature_stats(gt), feature_stats(gen));
  }

  if (!r.fvd_core) r.skipped.push_back("fvd_core");
  if (!r.mf) r.skipped.push_back("mf");
  if (!r.psnr) r.skipped.push_back("psnr");
  if (!r.ssim) r.skipped.push_back("ssim");
  if (!r.mpjpe_mm) r.skipped.push_back("mpjpe_mm");
  if (!r.pa_mpjpe_mm) r.skipped.push_back("pa_mpjpe_mm");
  if (!r.pa_mpvpe_mm) r.skipped.push_back("pa_mpvpe_mm");
  if (r.fscore_at.empty()) r.skipped.push_back("fscore_at");
  return r;
}

nlohmann::json report_to_json(const MetricsReport& r) {
  nlohmann::json j;
  j["schema"] = kReportSchema;
  put(j, "fvd_core", r.fvd_core);
  put(j, "mf", r.mf);
  put(j, "psnr", r.psnr);
  put(j, "ssim", r.ssim);
  put(j, "mpjpe_mm", r.mpjpe_mm);
  put(j, "pa_mpjpe_mm", r.pa_mpjpe_mm);
  put(j, "pa_mpvpe_mm", r.pa_mpvpe_mm);
  j["fscore_at"] = r.fscore_at;
  j["counts"] = {{"clips", r.clips}, {"frames", r.frames}, {"tracks", r.tracks}};
  j["skipped"] = r.skipped;
  j["per_clip"] = nlohmann::json::array();
  for (const auto& c : r.per_clip) {
    nlohmann::json e;
    e["id"] = c.id;
    put(e, "mf", c.mf);
    put(e, "psnr", c.psnr);
    put(e, "ssim", c.ssim);
    put(e, "mpjpe_mm", c.mpjpe_mm);
    put(e, "pa_mpjpe_mm", c.pa_mpjpe_mm);
    put(e, "pa_mpvpe_mm", c.pa_mpvpe_mm);
    e["fscore_at"] = c.fscore_at;
    e["counts"] = {{"image_frames", c.image_frames},
                   {"joint_frames", c.joint_frames},
                   {"vertex_frames", c.vertex_frames},
                   {"tracks", c.tracks}};
    e["skipped"] = c.skipped;
    j["per_clip"].push_back(std::move(e));
  }
  return j;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string csv_number(const std::optional<double>& v) {
  if (!v) return {};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", *v);
  return buf;
}

}  // namespace

std::string per_clip_csv(const MetricsReport& r, const PipelineConfig& cfg) {
  std::ostringstream out;
  out << "id,mf,psnr,ssim,mpjpe_mm,pa_mpjpe_mm,pa_mpvpe_mm";
  for (double t : cfg.fscore_thresholds_mm) out << ",fscore@" << threshold_label(t);
  out << '\n';
  for (const auto& c : r.per_clip) {
    out << csv_field(c.id) << ',' << csv_number(c.mf) << ',' << csv_number(c.psnr) << ','
        << csv_number(c.ssim) << ',' << csv_number(c.mpjpe_mm) << ',' << csv_number(c.pa_mpjpe_mm) << ','
        << csv_number(c.pa_mpvpe_mm);
    for (double t : cfg.fscore_thresholds_mm) {
      const auto it = c.fscore_at.find(threshold_label(t));
      out << ',' << csv_number(it == c.fscore_at.end() ? std::nullopt : std::optional<double>(it->second));
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace hoi
