#pragma once

#include "conditioning/latent.hpp"
#include "raster/image.hpp"

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace hoi {

inline constexpr int kLatentChannels = 16;
inline constexpr int kPatchSize = 8;
inline constexpr int kTemporalStride = 4;

enum class CueKind { Depth = 0, Seg = 1, Keypoint = 2 };
inline constexpr std::array<CueKind, 3> kAllCues{CueKind::Depth, CueKind::Seg, CueKind::Keypoint};

const char* cue_name(CueKind kind);
// Raw per-patch statistics before projection: depth 1, seg 4, keypoint 3.
int raw_channels(CueKind kind);

// Causal temporal compression: frame 0 alone, then groups of four.
// Throws Shape unless (frames - 1) % 4 == 0.
int latent_frame_count(int frames);

struct CueSet {
  std::vector<DepthMap> depth;
  std::vector<SegMap> seg;
  std::vector<KeypointImage> keypoint;

  // Throws Shape on unequal lengths or spatial sizes.
  void validate() const;
  int frames() const { return static_cast<int>(depth.size()); }
};

// Fixed raw->16 map with standard-normal entries, rounded to float32 so the
// persisted blob reproduces it exactly.
struct ProjectionMatrix {
  CueKind kind = CueKind::Depth;
  std::uint64_t seed = 0;
  Eigen::MatrixXd weights;  // 16 x raw_channels(kind)

  static ProjectionMatrix generate(CueKind kind, std::uint64_t seed);
  std::string file_name() const;  // projection_<kind>_<seed>.f32
  void save(const std::string& dir) const;
  static ProjectionMatrix load(const std::string& dir, CueKind kind, std::uint64_t seed);
};

// Per 8x8 patch: depth mean (m); seg class fractions over {bg, hand, object
// (label 2), other (3+)}; keypoint mean RGB / 255. Temporal grouping is
// applied to these statistics, then projected to 16 channels. Throws Shape
// unless H, W divisible by 8 and (F - 1) divisible by 4.
LatentTensor encode_cue(const CueSet& cues, CueKind kind, const ProjectionMatrix& projection, int jobs = 1);
LatentTensor encode_cue(const CueSet& cues, CueKind kind, std::uint64_t encoder_seed, int jobs = 1);

// Channel blocks in the fixed order (depth, seg, keypoint).
LatentTensor concat_channels(const LatentTensor& depth, const LatentTensor& seg, const LatentTensor& keypoint);

struct MaskedCues {
  CueSet cues;
  std::array<bool, 3> dropped{};  // indexed by CueKind
};

// One Bernoulli(p) draw per cue per clip, in cue order.
std::array<bool, 3> draw_cue_mask(double p, std::uint64_t seed);
// Dropped cues have every pixel zeroed.
MaskedCues mask_cues(const CueSet& cues, double p, std::uint64_t seed);

// Zero-initialized residual injection: per layer l, a duplicated-block map
// chains f'_0 = B_0 c, f'_l = B_l f'_{l-1}, and the output is
// f_l + Z_l f'_l with 1x1 channel mixes Z_l that start at exactly zero.
class InjectionOperator {
 public:
  InjectionOperator(int layers, int control_channels, int hidden_channels, int base_channels,
                    std::uint64_t seed);

  int layers() const { return static_cast<int>(blocks_.size()); }
  int control_channels() const { return control_channels_; }
  int hidden_channels() const { return hidden_channels_; }
  int base_channels() const { return base_channels_; }

  const Eigen::MatrixXd& block(int l) const { return blocks_.at(l); }
  const Eigen::MatrixXd& mix(int l) const { return mixes_.at(l); }
  void set_block(int l, Eigen::MatrixXd m);
  void set_mix(int l, Eigen::MatrixXd m);
  bool mixes_are_zero() const;

  // f'_l for every layer.
  std::vector<FeatureMap> duplicated_features(const LatentTensor& control) const;

  // Throws Shape when the layer count, grids or channel counts disagree.
  std::vector<FeatureMap> inject(std::span<const FeatureMap> base, const LatentTensor& control) const;

 private:
  int control_channels_;
  int hidden_channels_;
  int base_channels_;
  std::vector<Eigen::MatrixXd> blocks_;
  std::vector<Eigen::MatrixXd> mixes_;
};

}  // namespace hoi
