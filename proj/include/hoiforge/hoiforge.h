#ifndef HOIFORGE_H
#define HOIFORGE_H

#include <stddef.h>
#include <stdint.h>

#if defined(HF_BUILDING_LIBRARY)
#define HF_API __attribute__((visibility("default")))
#else
#define HF_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hf_status {
  HF_OK = 0,
  HF_ERR_INTERNAL = 1,
  HF_ERR_SCHEMA = 2,
  HF_ERR_IO = 3,
  HF_ERR_SHAPE = 4,
  HF_ERR_NON_WATERTIGHT = 5,
  HF_ERR_BEHIND_CAMERA = 6,
  HF_ERR_NO_FOREGROUND = 7,
  HF_ERR_LENGTH_MISMATCH = 8,
  HF_ERR_EMPTY_SET = 9,
  HF_ERR_DEGENERATE = 10,
  HF_ERR_INSUFFICIENT_SAMPLES = 11,
  HF_ERR_NOT_PSD = 12,
  HF_ERR_INVALID_ARGUMENT = 13
} hf_status;

typedef struct hf_config hf_config;
typedef struct hf_hand hf_hand;
typedef struct hf_mesh hf_mesh;

#define HF_POSE_SCALARS 51
#define HF_KEYPOINTS 21

/* Message of the last failed call on this thread ("" if none). */
HF_API const char* hf_last_error(void);
/* JSON summary of the last successful hf_run_* call on this thread. */
HF_API const char* hf_last_output(void);
HF_API const char* hf_status_name(hf_status status);
/* Process exit code: 0 ok, 1 internal, 2 input/schema, 3 shape/consistency. */
HF_API int hf_exit_code(hf_status status);
HF_API const char* hf_version(void);

/* Configuration (INI, or JSON when the path ends in .json). */
HF_API hf_status hf_config_load(const char* path, hf_config** out);
HF_API void hf_config_free(hf_config* cfg);
HF_API hf_status hf_config_apply_seed_override(hf_config* cfg, uint64_t k);
/* key: "hand" or "object". */
HF_API hf_status hf_config_set_asset(hf_config* cfg, const char* key, const char* path);
HF_API hf_status hf_config_frame_count(const hf_config* cfg, int* out);
/* Effective configuration as JSON; the pointer lives until the next call on this thread. */
HF_API hf_status hf_config_to_json(const hf_config* cfg, const char** out);

/* Hand model. Poses are 51 doubles: translation, then 16 axis-angle triples. */
HF_API hf_status hf_hand_create_default(hf_hand** out);
HF_API hf_status hf_hand_load(const char* path, hf_hand** out);
HF_API void hf_hand_free(hf_hand* hand);
HF_API hf_status hf_hand_vertex_count(const hf_hand* hand, size_t* out);
HF_API hf_status hf_hand_forward_kinematics(const hf_hand* hand, const double* pose, double* joints_out);
/* vertices_out holds 3 * capacity doubles. */
HF_API hf_status hf_hand_skin(const hf_hand* hand, const double* pose, double* vertices_out, size_t capacity);

/* Closed triangle meshes. */
HF_API hf_status hf_mesh_load_obj(const char* path, int instance_id, hf_mesh** out);
HF_API void hf_mesh_free(hf_mesh* mesh);
HF_API hf_status hf_mesh_vertex_count(const hf_mesh* mesh, size_t* out);
/* Posed hand against the object placed by rotation (axis-angle) and translation; meters. */
HF_API hf_status hf_penetration_depth(const hf_hand* hand, const double* pose, const hf_mesh* object,
                                      const double* object_rotation, const double* object_translation,
                                      double* out);

/* Metrics. Tracks are [track][frame][u, v]; points are [i][x, y, z] in mm. */
HF_API hf_status hf_motion_fidelity(const double* gt_xy, size_t gt_tracks, const double* gen_xy,
                                    size_t gen_tracks, size_t frames, double eps, double* out);
HF_API hf_status hf_mpjpe(const double* pred, const double* gt, double* out);
HF_API hf_status hf_pa_mpjpe(const double* pred, const double* gt, double* out);
HF_API hf_status hf_pa_mpvpe(const double* pred, const double* gt, size_t count, double* out);
HF_API hf_status hf_fscore(const double* pred, size_t pred_count, const double* gt, size_t gt_count,
                           double threshold_mm, double* out);
/* Interleaved 8-bit images, height x width x channels. */
HF_API hf_status hf_psnr(const uint8_t* a, const uint8_t* b, int width, int height, int channels, double* out);
HF_API hf_status hf_ssim(const uint8_t* a, const uint8_t* b, int width, int height, int channels, double* out);
/* Feature matrices are row-major, one sample per row. */
HF_API hf_status hf_frechet_distance(const double* a, size_t a_rows, const double* b, size_t b_rows,
                                     size_t dim, double* out);

/* Commands. jobs < 1 is treated as 1; outputs do not depend on it. */
HF_API hf_status hf_run_trajgen(const hf_config* cfg, const char* endpoints, const char* out_sequence,
                                const char* out_report, int jobs);
HF_API hf_status hf_run_render(const hf_config* cfg, const char* sequence, const char* out_dir, int jobs);
HF_API hf_status hf_run_pack(const hf_config* cfg, const char* conditions_dir, const char* out_dir, int jobs);
HF_API hf_status hf_run_eval(const hf_config* cfg, const char* manifest, const char* out_report,
                             const char* out_csv, int jobs);
/* fraction < 0 uses the configured discard fraction. */
HF_API hf_status hf_run_filter(const hf_config* cfg, const char* manifest, const char* out_manifest,
                               double fraction);
HF_API hf_status hf_run_pipeline(const hf_config* cfg, const char* endpoints, const char* out_dir,
                                 const char* generated_dir, const char* reference_dir, int jobs);

#ifdef __cplusplus
}
#endif

#endif
