#include "pipeline/commands.hpp"

#include "common/error.hpp"
#include "common/parallel.hpp"
#include "conditioning/conditioning.hpp"
#include "hand_geometry/proximity.hpp"
#include "metrics/pose_metrics.hpp"
#include "pipeline/files.hpp"
#include "pipeline/manifest.hpp"
#include "raster/image_io.hpp"
#include "raster/keypoints.hpp"
#include "raster/rasterizer.hpp"
#include "raster/tracklets.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

namespace hoi {

namespace fs = std::filesystem;

namespace {

void write_json(const nlohmann::json& j, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write '" + path + "'");
  out << j.dump(2) << '\n';
  if (!out) fail(ErrorCode::Io, "failed writing '" + path + "'");
}

void write_text(const std::string& text, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write '" + path + "'");
  out << text;
  if (!out) fail(ErrorCode::Io, "failed writing '" + path + "'");
}

std::string frame_name(const char* prefix, std::size_t f, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%04zu%s", prefix, f, ext);
  return buf;
}

std::string join(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

void ensure_parent(const std::string& path) {
  const auto parent = fs::path(path).parent_path();
  if (!parent.empty()) ensure_directory(parent.string());
}

}  // namespace

KinematicHand load_configured_hand(const PipelineConfig& cfg) {
  if (cfg.hand_model.empty()) return make_default_hand();
  return load_hand(cfg.hand_model);
}

TriMesh load_configured_object(const PipelineConfig& cfg) {
  if (cfg.object_mesh.empty()) fail(ErrorCode::Schema, "assets.object is not set");
  return load_obj(cfg.object_mesh, cfg.object_instance_id);
}

TrajgenResult run_trajgen(const PipelineConfig& cfg, const std::string& endpoints_path,
                          const std::string& sequence_path, const std::string& report_path, int jobs) {
  const Endpoints ends = load_endpoints(endpoints_path);
  const KinematicHand hand = load_configured_hand(cfg);

  TrajgenResult r;
  r.sequence = interpolate_sequence(ends.hand_start, ends.hand_end, ends.object_start, ends.object_end,
                                    cfg.trajectory, hand.wrist());
  ensure_parent(sequence_path);
  save_sequence(r.sequence, sequence_path);
  // The sequence stays on disk even when the object cannot be loaded.
  const TriMesh object = load_configured_object(cfg);
  r.validation = validate_sequence(r.sequence, hand, object, cfg.trajectory, ends, jobs);
  if (!report_path.empty()) {
    ensure_parent(report_path);
    write_json(validation_to_json(r.validation), report_path);
  }
  return r;
}

nlohmann::json run_render(const PipelineConfig& cfg, const std::string& sequence_path,
                          const std::string& out_dir, int jobs) {
  const PoseSequence seq = load_sequence(sequence_path);
  if (seq.frames.empty()) fail(ErrorCode::Shape, sequence_path + ": sequence has no frames");
  const KinematicHand hand = load_configured_hand(cfg);
  const TriMesh object = load_configured_object(cfg);
  const Camera& cam = cfg.camera;

  const std::string depth_dir = join(out_dir, "depth");
  const std::string seg_dir = join(out_dir, "seg");
  const std::string kp_dir = join(out_dir, "keypoints");
  for (const auto& d : {depth_dir, seg_dir, kp_dir}) ensure_directory(d);

  const std::size_t n = seq.frames.size();
  const bool pfm = cfg.depth_format == DepthFormat::Pfm;
  MeshSequence scenes(n);
  std::vector<DepthMap> depth(n);
  parallel_for(n, jobs, [&](std::size_t f) {
    const PoseFrame& pose = seq.frames[f];
    scenes[f] = {skin_mesh(hand, pose.hand), apply_object_pose(object, pose.object)};
    RasterResult rr = rasterize(scenes[f], cam);
    const KeypointImage kp = render_keypoints(forward_kinematics(hand, pose.hand), cam);
    if (pfm) {
      write_depth_pfm(rr.depth, join(depth_dir, frame_name("depth", f, ".pfm")));
    } else {
      write_depth_png(rr.depth, join(depth_dir, frame_name("depth", f, ".png")));
    }
    write_seg_png(rr.seg, join(seg_dir, frame_name("seg", f, ".png")));
    write_rgb_png(kp, join(kp_dir, frame_name("keypoints", f, ".png")));
    depth[f] = std::move(rr.depth);
  });

  std::vector<Tracklet> tracks;
  bool foreground = true;
  try {
    tracks = generate_tracklets(scenes, depth, cam, cfg.tracklet_count, cfg.seeds.tracklets);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoForeground) throw;
    foreground = false;
  }
  if (foreground) {
    save_tracklets(tracks, join(out_dir, "tracklets.json"));
  } else {
    write_json({{"n", 0}, {"frames", n}, {"tracks", nlohmann::json::array()}}, join(out_dir, "tracklets.json"));
  }

  return {{"frames", n},
          {"tracks", tracks.size()},
          {"foreground_at_start", foreground},
          {"depth_format", pfm ? "pfm" : "png"}};
}

nlohmann::json run_pack(const PipelineConfig& cfg, const std::string& conditions_dir,
                        const std::string& out_dir, int jobs) {
  const bool pfm = cfg.depth_format == DepthFormat::Pfm;
  const auto depth_files = list_frame_files(join(conditions_dir, "depth"), pfm ? ".pfm" : ".png");
  const auto seg_files = list_frame_files(join(conditions_dir, "seg"), ".png");
  const auto kp_files = list_frame_files(join(conditions_dir, "keypoints"), ".png");
  if (depth_files.size() != seg_files.size() || depth_files.size() != kp_files.size()) {
    fail(ErrorCode::Shape, "condition frame counts differ: " + std::to_string(depth_files.size()) + " in " +
                               join(conditions_dir, "depth") + ", " + std::to_string(seg_files.size()) +
                               " in " + join(conditions_dir, "seg") + ", " + std::to_string(kp_files.size()) +
                               " in " + join(conditions_dir, "keypoints"));
  }
  if (depth_files.empty()) fail(ErrorCode::Shape, "no condition frames under " + conditions_dir);

  const std::size_t n = depth_files.size();
  CueSet cues;
  cues.depth.resize(n);
  cues.seg.resize(n);
  cues.keypoint.resize(n);
  parallel_for(n, jobs, [&](std::size_t f) {
    cues.depth[f] = pfm ? read_depth_pfm(depth_files[f]) : read_depth_png(depth_files[f]);
    cues.seg[f] = read_seg_png(seg_files[f]);
    cues.keypoint[f] = read_png8(kp_files[f]);
    const auto& d = cues.depth[f];
    const auto& s = cues.seg[f];
    const auto& k = cues.keypoint[f];
    if (k.channels != 3) fail(ErrorCode::Shape, kp_files[f] + ": keypoint image must be RGB");
    if (s.width != d.width || s.height != d.height || k.width != d.width || k.height != d.height) {
      fail(ErrorCode::Shape, "frame " + std::to_string(f) + ": " + depth_files[f] + ", " + seg_files[f] +
                                 " and " + kp_files[f] + " differ in size");
    }
  });
  if (cues.depth[0].width % kPatchSize != 0 || cues.depth[0].height % kPatchSize != 0) {
    fail(ErrorCode::Shape, depth_files[0] + ": resolution " + std::to_string(cues.depth[0].width) + "x" +
                               std::to_string(cues.depth[0].height) + " is not divisible by 8");
  }
  cues.validate();
  latent_frame_count(static_cast<int>(n));

  ensure_directory(out_dir);
  const MaskedCues masked = mask_cues(cues, cfg.mask_probability, cfg.seeds.mask);
  const std::array<std::uint64_t, 3> seeds{cfg.seeds.depth_encoder, cfg.seeds.seg_encoder,
                                           cfg.seeds.keypoint_encoder};
  std::array<LatentTensor, 3> latents;
  nlohmann::json masked_flags;
  for (CueKind kind : kAllCues) {
    const int k = static_cast<int>(kind);
    const ProjectionMatrix proj = ProjectionMatrix::generate(kind, seeds[k]);
    proj.save(out_dir);
    latents[k] = encode_cue(masked.cues, kind, proj, jobs);
    save_latent(latents[k], join(out_dir, cue_name(kind)),
                {{"masked", masked.dropped[k]},
                 {"mask_seed", cfg.seeds.mask},
                 {"mask_probability", cfg.mask_probability},
                 {"encoder_seed", seeds[k]},
                 {"projection", proj.file_name()}});
    masked_flags[cue_name(kind)] = masked.dropped[k];
  }
  const LatentTensor concat = concat_channels(latents[0], latents[1], latents[2]);
  save_latent(concat, join(out_dir, "concat"), {{"masked", masked_flags}, {"blocks", {"depth", "seg", "keypoint"}}});

  return {{"frames", n}, {"latent_shape", concat.shape()}, {"masked", masked_flags}};
}

MetricsReport run_eval(const PipelineConfig& cfg, const std::string& manifest_path,
                       const std::string& report_path, const std::string& csv_path, int jobs) {
  const ClipManifest manifest = load_manifest(manifest_path);
  MetricsReport report = evaluate_manifest(manifest, cfg, jobs);
  ensure_parent(report_path);
  write_json(report_to_json(report), report_path);
  if (!csv_path.empty()) {
    ensure_parent(csv_path);
    write_text(per_clip_csv(report, cfg), csv_path);
  }
  return report;
}

std::vector<std::string> run_filter(const PipelineConfig& cfg, const std::string& manifest_path,
                                    const std::string& out_path, std::optional<double> fraction) {
  const ClipManifest manifest = load_manifest(manifest_path);
  std::vector<Candidate> candidates;
  for (const auto& clip : manifest.clips) {
    if (!clip.pose_error_mm) {
      fail(ErrorCode::Schema, manifest_path + ": clip '" + clip.id + "' has no pose_error_mm");
    }
    candidates.push_back({clip.id, *clip.pose_error_mm});
  }
  const auto ranked = rank_and_filter(candidates, fraction.value_or(cfg.discard_fraction));
  const std::set<std::string> keep(ranked.begin(), ranked.end());
  std::vector<ClipRecord> kept;
  std::vector<std::string> ids;
  for (const auto& clip : manifest.clips) {
    if (!keep.count(clip.id)) continue;
    kept.push_back(clip);
    ids.push_back(clip.id);
  }
  ensure_parent(out_path);
  save_manifest(kept, manifest.base_dir, out_path);
  return ids;
}

nlohmann::json run_pipeline(const PipelineConfig& cfg, const PipelineInputs& in, int jobs) {
  ensure_directory(in.out_dir);
  const std::string poses = join(in.out_dir, "poses");
  const std::string conditions = join(in.out_dir, "conditions");
  const std::string latents = join(in.out_dir, "latents");
  const std::string report_path = join(in.out_dir, "report.json");

  nlohmann::json report;
  report["schema"] = kReportSchema;
  report["config"] = config_to_json(cfg);
  std::string stage;
  try {
    stage = "trajgen";
    const TrajgenResult traj = run_trajgen(cfg, in.endpoints_path, join(poses, "sequence.json"),
                                           join(poses, "validation.json"), jobs);
    report["validation"] = validation_to_json(traj.validation);

    stage = "render";
    report["render"] = run_render(cfg, join(poses, "sequence.json"), conditions, jobs);

    stage = "pack";
    report["pack"] = run_pack(cfg, conditions, latents, jobs);

    if (!in.generated_dir.empty()) {
      stage = "eval";
      ClipRecord clip;
      clip.id = "pipeline";
      clip.gt_tracklets = join(conditions, "tracklets.json");
      const std::string gen_tracks = join(in.generated_dir, "tracklets.json");
      if (fs::exists(gen_tracks)) clip.gen_tracklets = gen_tracks;
      clip.generated_frames = in.generated_dir;
      if (!in.reference_dir.empty()) clip.reference_frames = in.reference_dir;
      ClipManifest manifest;
      manifest.clips.push_back(clip);
      report["metrics"] = report_to_json(evaluate_manifest(manifest, cfg, jobs));
    }
    report["status"] = "ok";
  } catch (const std::exception& e) {
    report["status"] = "failed";
    report["failed_stage"] = stage;
    report["error"] = e.what();
    try {
      write_json(report, report_path);
    } catch (const std::exception&) {
    }
    throw;
  }
  write_json(report, report_path);
  return report;
}

}  // namespace hoi
