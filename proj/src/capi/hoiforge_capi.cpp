#include "hoiforge/hoiforge.h"

#include "common/error.hpp"
#include "hand_geometry/hand_model.hpp"
#include "hand_geometry/proximity.hpp"
#include "metrics/frechet.hpp"
#include "metrics/image_metrics.hpp"
#include "metrics/motion.hpp"
#include "metrics/pose_metrics.hpp"
#include "pipeline/commands.hpp"
#include "pipeline/config.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <memory>
#include <new>
#include <optional>
#include <string>
#include <vector>

struct hf_config {
  hoi::PipelineConfig cfg;
};

struct hf_hand {
  hoi::KinematicHand hand;
};

struct hf_mesh {
  hoi::TriMesh mesh;
};

namespace {

thread_local std::string g_last_error;
thread_local std::string g_last_output;
thread_local std::string g_scratch;

hf_status to_status(hoi::ErrorCode code) {
  using hoi::ErrorCode;
  switch (code) {
    case ErrorCode::Internal: return HF_ERR_INTERNAL;
    case ErrorCode::Schema: return HF_ERR_SCHEMA;
    case ErrorCode::Io: return HF_ERR_IO;
    case ErrorCode::Shape: return HF_ERR_SHAPE;
    case ErrorCode::NonWatertight: return HF_ERR_NON_WATERTIGHT;
    case ErrorCode::BehindCamera: return HF_ERR_BEHIND_CAMERA;
    case ErrorCode::NoForeground: return HF_ERR_NO_FOREGROUND;
    case ErrorCode::LengthMismatch: return HF_ERR_LENGTH_MISMATCH;
    case ErrorCode::EmptySet: return HF_ERR_EMPTY_SET;
    case ErrorCode::Degenerate: return HF_ERR_DEGENERATE;
    case ErrorCode::InsufficientSamples: return HF_ERR_INSUFFICIENT_SAMPLES;
    case ErrorCode::NotPSD: return HF_ERR_NOT_PSD;
    case ErrorCode::InvalidArgument: return HF_ERR_INVALID_ARGUMENT;
  }
  return HF_ERR_INTERNAL;
}

std::optional<hoi::ErrorCode> to_code(hf_status s) {
  using hoi::ErrorCode;
  switch (s) {
    case HF_OK: return std::nullopt;
    case HF_ERR_INTERNAL: return ErrorCode::Internal;
    case HF_ERR_SCHEMA: return ErrorCode::Schema;
    case HF_ERR_IO: return ErrorCode::Io;
    case HF_ERR_SHAPE: return ErrorCode::Shape;
    case HF_ERR_NON_WATERTIGHT: return ErrorCode::NonWatertight;
    case HF_ERR_BEHIND_CAMERA: return ErrorCode::BehindCamera;
    case HF_ERR_NO_FOREGROUND: return ErrorCode::NoForeground;
    case HF_ERR_LENGTH_MISMATCH: return ErrorCode::LengthMismatch;
    case HF_ERR_EMPTY_SET: return ErrorCode::EmptySet;
    case HF_ERR_DEGENERATE: return ErrorCode::Degenerate;
    case HF_ERR_INSUFFICIENT_SAMPLES: return ErrorCode::InsufficientSamples;
    case HF_ERR_NOT_PSD: return ErrorCode::NotPSD;
    case HF_ERR_INVALID_ARGUMENT: return ErrorCode::InvalidArgument;
  }
  return ErrorCode::Internal;
}

template <class Fn>
hf_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return HF_OK;
  } catch (const hoi::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return HF_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return HF_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return HF_ERR_INTERNAL;
  }
}

void require(const void* p, const char* name) {
  if (!p) hoi::fail(hoi::ErrorCode::InvalidArgument, std::string(name) + " is null");
}

std::string opt_str(const char* s) { return s ? std::string(s) : std::string(); }

hoi::HandPose pose_from(const double* pose) {
  return hoi::HandPose::from_scalars(std::span<const double>(pose, HF_POSE_SCALARS));
}

std::vector<hoi::Vec3> points_from(const double* xyz, size_t n) {
  std::vector<hoi::Vec3> out(n);
  for (size_t i = 0; i < n; ++i) out[i] = hoi::Vec3(xyz[3 * i], xyz[3 * i + 1], xyz[3 * i + 2]);
  return out;
}

std::vector<hoi::Tracklet> tracks_from(const double* xy, size_t tracks, size_t frames) {
  std::vector<hoi::Tracklet> out(tracks);
  for (size_t t = 0; t < tracks; ++t) {
    out[t].points.resize(frames);
    out[t].visible.assign(frames, true);
    for (size_t f = 0; f < frames; ++f) {
      const double* p = xy + 2 * (t * frames + f);
      out[t].points[f] = hoi::Vec2(p[0], p[1]);
    }
  }
  return out;
}

hoi::Image8 image_from(const uint8_t* data, int width, int height, int channels) {
  if (width <= 0 || height <= 0 || channels <= 0) {
    hoi::fail(hoi::ErrorCode::InvalidArgument, "image dimensions must be positive");
  }
  hoi::Image8 img;
  img.width = width;
  img.height = height;
  img.channels = channels;
  img.data.assign(data, data + static_cast<size_t>(width) * height * channels);
  return img;
}

Eigen::MatrixXd matrix_from(const double* values, size_t rows, size_t cols) {
  Eigen::MatrixXd m(rows, cols);
  for (size_t r = 0; r < rows; ++r) {
    for (size_t c = 0; c < cols; ++c) m(r, c) = values[r * cols + c];
  }
  return m;
}

int jobs_of(int jobs) { return std::max(jobs, 1); }

}  // namespace

extern "C" {

const char* hf_last_error(void) { return g_last_error.c_str(); }
const char* hf_last_output(void) { return g_last_output.c_str(); }

const char* hf_status_name(hf_status status) {
  const auto code = to_code(status);
  return code ? hoi::error_code_name(*code) : "Ok";
}

int hf_exit_code(hf_status status) {
  const auto code = to_code(status);
  return code ? hoi::exit_code_for(*code) : 0;
}

const char* hf_version(void) { return "0.1.0"; }

hf_status hf_config_load(const char* path, hf_config** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    auto cfg = std::make_unique<hf_config>();
    cfg->cfg = hoi::load_config(path);
    *out = cfg.release();
  });
}

void hf_config_free(hf_config* cfg) { delete cfg; }

hf_status hf_config_apply_seed_override(hf_config* cfg, uint64_t k) {
  return guarded([&] {
    require(cfg, "cfg");
    cfg->cfg.apply_seed_override(k);
  });
}

hf_status hf_config_set_asset(hf_config* cfg, const char* key, const char* path) {
  return guarded([&] {
    require(cfg, "cfg");
    require(key, "key");
    require(path, "path");
    const std::string k(key);
    if (k == "hand") {
      cfg->cfg.hand_model = path;
    } else if (k == "object") {
      cfg->cfg.object_mesh = path;
    } else {
      hoi::fail(hoi::ErrorCode::InvalidArgument, "unknown asset '" + k + "'");
    }
  });
}

hf_status hf_config_frame_count(const hf_config* cfg, int* out) {
  return guarded([&] {
    require(cfg, "cfg");
    require(out, "out");
    *out = cfg->cfg.trajectory.frame_count;
  });
}

hf_status hf_config_to_json(const hf_config* cfg, const char** out) {
  return guarded([&] {
    require(cfg, "cfg");
    require(out, "out");
    g_scratch = hoi::config_to_json(cfg->cfg).dump(2);
    *out = g_scratch.c_str();
  });
}

hf_status hf_hand_create_default(hf_hand** out) {
  return guarded([&] {
    require(out, "out");
    *out = new hf_hand{hoi::make_default_hand()};
  });
}

hf_status hf_hand_load(const char* path, hf_hand** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    *out = new hf_hand{hoi::load_hand(path)};
  });
}

void hf_hand_free(hf_hand* hand) { delete hand; }

hf_status hf_hand_vertex_count(const hf_hand* hand, size_t* out) {
  return guarded([&] {
    require(hand, "hand");
    require(out, "out");
    *out = hand->hand.template_mesh().vertices.size();
  });
}

hf_status hf_hand_forward_kinematics(const hf_hand* hand, const double* pose, double* joints_out) {
  return guarded([&] {
    require(hand, "hand");
    require(pose, "pose");
    require(joints_out, "joints_out");
    const auto joints = hoi::forward_kinematics(hand->hand, pose_from(pose));
    for (int k = 0; k < HF_KEYPOINTS; ++k) {
      for (int c = 0; c < 3; ++c) joints_out[3 * k + c] = joints[k][c];
    }
  });
}

hf_status hf_hand_skin(const hf_hand* hand, const double* pose, double* vertices_out, size_t capacity) {
  return guarded([&] {
    require(hand, "hand");
    require(pose, "pose");
    require(vertices_out, "vertices_out");
    const hoi::TriMesh mesh = hoi::skin_mesh(hand->hand, pose_from(pose));
    if (capacity < mesh.vertices.size()) {
      hoi::fail(hoi::ErrorCode::InvalidArgument, "vertex buffer holds " + std::to_string(capacity) +
                                                     " vertices, need " + std::to_string(mesh.vertices.size()));
    }
    for (size_t i = 0; i < mesh.vertices.size(); ++i) {
      for (int c = 0; c < 3; ++c) vertices_out[3 * i + c] = mesh.vertices[i][c];
    }
  });
}

hf_status hf_mesh_load_obj(const char* path, int instance_id, hf_mesh** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    *out = new hf_mesh{hoi::load_obj(path, instance_id)};
  });
}

void hf_mesh_free(hf_mesh* mesh) { delete mesh; }

hf_status hf_mesh_vertex_count(const hf_mesh* mesh, size_t* out) {
  return guarded([&] {
    require(mesh, "mesh");
    require(out, "out");
    *out = mesh->mesh.vertices.size();
  });
}

hf_status hf_penetration_depth(const hf_hand* hand, const double* pose, const hf_mesh* object,
                               const double* object_rotation, const double* object_translation, double* out) {
  return guarded([&] {
    require(hand, "hand");
    require(pose, "pose");
    require(object, "object");
    require(out, "out");
    hoi::ObjectPose op;
    if (object_rotation) op.rotation = hoi::Vec3(object_rotation[0], object_rotation[1], object_rotation[2]);
    if (object_translation) {
      op.translation = hoi::Vec3(object_translation[0], object_translation[1], object_translation[2]);
    }
    const hoi::TriMesh hand_mesh = hoi::skin_mesh(hand->hand, pose_from(pose));
    *out = hoi::penetration_depth(hand_mesh, hoi::apply_object_pose(object->mesh, op));
  });
}

hf_status hf_motion_fidelity(const double* gt_xy, size_t gt_tracks, const double* gen_xy, size_t gen_tracks,
                             size_t frames, double eps, double* out) {
  return guarded([&] {
    require(out, "out");
    if (gt_tracks > 0) require(gt_xy, "gt_xy");
    if (gen_tracks > 0) require(gen_xy, "gen_xy");
    const auto gt = tracks_from(gt_xy, gt_tracks, frames);
    const auto gen = tracks_from(gen_xy, gen_tracks, frames);
    *out = hoi::motion_fidelity(gt, gen, eps);
  });
}

hf_status hf_mpjpe(const double* pred, const double* gt, double* out) {
  return guarded([&] {
    require(pred, "pred");
    require(gt, "gt");
    require(out, "out");
    *out = hoi::mpjpe_root_aligned({points_from(pred, HF_KEYPOINTS), hoi::JointRole::Predicted},
                                   {points_from(gt, HF_KEYPOINTS), hoi::JointRole::GroundTruth});
  });
}

hf_status hf_pa_mpjpe(const double* pred, const double* gt, double* out) {
  return guarded([&] {
    require(pred, "pred");
    require(gt, "gt");
    require(out, "out");
    *out = hoi::pa_mpjpe({points_from(pred, HF_KEYPOINTS), hoi::JointRole::Predicted},
                         {points_from(gt, HF_KEYPOINTS), hoi::JointRole::GroundTruth});
  });
}

hf_status hf_pa_mpvpe(const double* pred, const double* gt, size_t count, double* out) {
  return guarded([&] {
    require(pred, "pred");
    require(gt, "gt");
    require(out, "out");
    *out = hoi::pa_mpvpe(points_from(pred, count), points_from(gt, count));
  });
}

hf_status hf_fscore(const double* pred, size_t pred_count, const double* gt, size_t gt_count,
                    double threshold_mm, double* out) {
  return guarded([&] {
    require(out, "out");
    if (pred_count > 0) require(pred, "pred");
    if (gt_count > 0) require(gt, "gt");
    *out = hoi::fscore(points_from(pred, pred_count), points_from(gt, gt_count), threshold_mm);
  });
}

hf_status hf_psnr(const uint8_t* a, const uint8_t* b, int width, int height, int channels, double* out) {
  return guarded([&] {
    require(a, "a");
    require(b, "b");
    require(out, "out");
    *out = hoi::psnr(image_from(a, width, height, channels), image_from(b, width, height, channels));
  });
}

hf_status hf_ssim(const uint8_t* a, const uint8_t* b, int width, int height, int channels, double* out) {
  return guarded([&] {
    require(a, "a");
    require(b, "b");
    require(out, "out");
    *out = hoi::ssim(image_from(a, width, height, channels), image_from(b, width, height, channels));
  });
}

hf_status hf_frechet_distance(const double* a, size_t a_rows, const double* b, size_t b_rows, size_t dim,
                              double* out) {
  return guarded([&] {
    require(a, "a");
    require(b, "b");
    require(out, "out");
    *out = hoi::frechet_distance(hoi::feature_stats(matrix_from(a, a_rows, dim)),
                                 hoi::feature_stats(matrix_from(b, b_rows, dim)));
  });
}

hf_status hf_run_trajgen(const hf_config* cfg, const char* endpoints, const char* out_sequence,
                         const char* out_report, int jobs) {
  return guarded([&] {
    require(cfg, "cfg");
    require(endpoints, "endpoints");
    require(out_sequence, "out_sequence");
    const auto r = hoi::run_trajgen(cfg->cfg, endpoints, out_sequence, opt_str(out_report), jobs_of(jobs));
    g_last_output = hoi::validation_to_json(r.validation).dump();
  });
}

hf_status hf_run_render(const hf_config* cfg, const char* sequence, const char* out_dir, int jobs) {
  return guarded([&] {
    require(cfg, "cfg");
    require(sequence, "sequence");
    require(out_dir, "out_dir");
    g_last_output = hoi::run_render(cfg->cfg, sequence, out_dir, jobs_of(jobs)).dump();
  });
}

hf_status hf_run_pack(const hf_config* cfg, const char* conditions_dir, const char* out_dir, int jobs) {
  return guarded([&] {
    require(cfg, "cfg");
    require(conditions_dir, "conditions_dir");
    require(out_dir, "out_dir");
    g_last_output = hoi::run_pack(cfg->cfg, conditions_dir, out_dir, jobs_of(jobs)).dump();
  });
}

hf_status hf_run_eval(const hf_config* cfg, const char* manifest, const char* out_report, const char* out_csv,
                      int jobs) {
  return guarded([&] {
    require(cfg, "cfg");
    require(manifest, "manifest");
    require(out_report, "out_report");
    const auto r = hoi::run_eval(cfg->cfg, manifest, out_report, opt_str(out_csv), jobs_of(jobs));
    nlohmann::json j = hoi::report_to_json(r);
    j.erase("per_clip");
    g_last_output = j.dump();
  });
}

hf_status hf_run_filter(const hf_config* cfg, const char* manifest, const char* out_manifest, double fraction) {
  return guarded([&] {
    require(cfg, "cfg");
    require(manifest, "manifest");
    require(out_manifest, "out_manifest");
    const std::optional<double> f = fraction < 0.0 ? std::nullopt : std::optional<double>(fraction);
    const auto kept = hoi::run_filter(cfg->cfg, manifest, out_manifest, f);
    g_last_output = nlohmann::json{{"kept", kept.size()}, {"ids", kept}}.dump();
  });
}

hf_status hf_run_pipeline(const hf_config* cfg, const char* endpoints, const char* out_dir,
                          const char* generated_dir, const char* reference_dir, int jobs) {
  return guarded([&] {
    require(cfg, "cfg");
    require(endpoints, "endpoints");
    require(out_dir, "out_dir");
    const hoi::PipelineInputs in{endpoints, out_dir, opt_str(generated_dir), opt_str(reference_dir)};
    const auto report = hoi::run_pipeline(cfg->cfg, in, jobs_of(jobs));
    nlohmann::json summary{{"status", report.at("status")}, {"validation_pass", report.at("validation").at("pass")}};
    if (report.contains("pack")) summary["latent_shape"] = report["pack"]["latent_shape"];
    g_last_output = summary.dump();
  });
}

}  // extern "C"
