#include "conditioning/conditioning.hpp"

#include "common/error.hpp"
#include "common/parallel.hpp"
#include "common/rng.hpp"

#include <cmath>
#include <filesystem>

namespace hoi {

const char* cue_name(CueKind kind) {
  switch (kind) {
    case CueKind::Depth: return "depth";
    case CueKind::Seg: return "seg";
    case CueKind::Keypoint: return "keypoint";
  }
  return "?";
}

int raw_channels(CueKind kind) {
  switch (kind) {
    case CueKind::Depth: return 1;
    case CueKind::Seg: return 4;
    case CueKind::Keypoint: return 3;
  }
  return 0;
}

int latent_frame_count(int frames) {
  if (frames < 1 || (frames - 1) % kTemporalStride != 0) {
    fail(ErrorCode::Shape, "frame count " + std::to_string(frames) +
                               " is not 1 + 4k; latent packing needs (F - 1) divisible by 4");
  }
  return 1 + (frames - 1) / kTemporalStride;
}

void CueSet::validate() const {
  if (depth.size() != seg.size() || depth.size() != keypoint.size()) {
    fail(ErrorCode::Shape, "cue sequences differ in length: depth " + std::to_string(depth.size()) +
                               ", seg " + std::to_string(seg.size()) + ", keypoint " +
                               std::to_string(keypoint.size()));
  }
  if (depth.empty()) return;
  const int w = depth.front().width;
  const int h = depth.front().height;
  auto check = [&](int fw, int fh, const char* what) {
    if (fw != w || fh != h) fail(ErrorCode::Shape, std::string(what) + " frame size differs from depth");
  };
  for (const auto& d : depth) check(d.width, d.height, "depth");
  for (const auto& s : seg) check(s.width, s.height, "seg");
  for (const auto& k : keypoint) {
    check(k.width, k.height, "keypoint");
    if (k.channels != 3) fail(ErrorCode::Shape, "keypoint frames must be RGB");
  }
}

ProjectionMatrix ProjectionMatrix::generate(CueKind kind, std::uint64_t seed) {
  ProjectionMatrix p;
  p.kind = kind;
  p.seed = seed;
  p.weights.resize(kLatentChannels, raw_channels(kind));
  Rng rng(Rng::mix(seed) ^ (0x1000 + static_cast<std::uint64_t>(kind)));
  for (int r = 0; r < p.weights.rows(); ++r) {
    for (int c = 0; c < p.weights.cols(); ++c) {
      p.weights(r, c) = static_cast<double>(static_cast<float>(rng.normal()));
    }
  }
  return p;
}

std::string ProjectionMatrix::file_name() const {
  return std::string("projection_") + cue_name(kind) + "_" + std::to_string(seed) + ".f32";
}

void ProjectionMatrix::save(const std::string& dir) const {
  std::vector<float> values;
  for (int r = 0; r < weights.rows(); ++r) {
    for (int c = 0; c < weights.cols(); ++c) values.push_back(static_cast<float>(weights(r, c)));
  }
  write_f32_blob((std::filesystem::path(dir) / file_name()).string(), values);
}

ProjectionMatrix ProjectionMatrix::load(const std::string& dir, CueKind kind, std::uint64_t seed) {
  ProjectionMatrix p;
  p.kind = kind;
  p.seed = seed;
  const auto values = read_f32_blob((std::filesystem::path(dir) / p.file_name()).string());
  const int cols = raw_channels(kind);
  if (values.size() != static_cast<std::size_t>(kLatentChannels * cols)) {
    fail(ErrorCode::Shape, "projection blob " + p.file_name() + " has the wrong size");
  }
  p.weights.resize(kLatentChannels, cols);
  for (int r = 0; r < kLatentChannels; ++r) {
    for (int c = 0; c < cols; ++c) p.weights(r, c) = values[r * cols + c];
  }
  return p;
}

namespace {

// Frame size of the chosen cue; throws Shape on inconsistent frames.
std::array<int, 3> cue_geometry(const CueSet& cues, CueKind kind) {
  auto check_all = [](const auto& seq) -> std::array<int, 3> {
    if (seq.empty()) fail(ErrorCode::Shape, "cue sequence is empty");
    const int w = seq.front().width, h = seq.front().height;
    for (const auto& img : seq) {
      if (img.width != w || img.height != h) fail(ErrorCode::Shape, "cue frames differ in size");
    }
    return {static_cast<int>(seq.size()), h, w};
  };
  switch (kind) {
    case CueKind::Depth: return check_all(cues.depth);
    case CueKind::Seg: return check_all(cues.seg);
    case CueKind::Keypoint: return check_all(cues.keypoint);
  }
  return {0, 0, 0};
}

// Patch statistics of one input frame into `out` (gh * gw * raw values).
void patch_stats(const CueSet& cues, CueKind kind, int frame, int gh, int gw, std::vector<double>& out) {
  const int raw = raw_channels(kind);
  out.assign(static_cast<std::size_t>(gh) * gw * raw, 0.0);
  constexpr double inv_pixels = 1.0 / (kPatchSize * kPatchSize);
  for (int py = 0; py < gh; ++py) {
    for (int px = 0; px < gw; ++px) {
      double* cell = out.data() + (static_cast<std::size_t>(py) * gw + px) * raw;
      for (int dy = 0; dy < kPatchSize; ++dy) {
        const int row = py * kPatchSize + dy;
        for (int dx = 0; dx < kPatchSize; ++dx) {
          const int col = px * kPatchSize + dx;
          switch (kind) {
            case CueKind::Depth:
              cell[0] += cues.depth[frame].at(row, col);
              break;
            case CueKind::Seg: {
              const int label = cues.seg[frame].at(row, col);
              cell[std::min(label, 3)] += 1.0;
              break;
            }
            case CueKind::Keypoint:
              for (int c = 0; c < 3; ++c) cell[c] += cues.keypoint[frame].at(row, col, c) / 255.0;
              break;
          }
        }
      }
      for (int c = 0; c < raw; ++c) cell[c] *= inv_pixels;
    }
  }
}

}  // namespace

LatentTensor encode_cue(const CueSet& cues, CueKind kind, const ProjectionMatrix& projection, int jobs) {
  if (projection.kind != kind || projection.weights.cols() != raw_channels(kind) ||
      projection.weights.rows() != kLatentChannels) {
    fail(ErrorCode::Shape, std::string("projection matrix does not match cue ") + cue_name(kind));
  }
  const auto [frames, height, width] = cue_geometry(cues, kind);
  if (height % kPatchSize != 0 || width % kPatchSize != 0) {
    fail(ErrorCode::Shape, "frame size " + std::to_string(height) + "x" + std::to_string(width) +
                               " is not divisible by 8");
  }
  const int latent_frames = latent_frame_count(frames);
  const int gh = height / kPatchSize;
  const int gw = width / kPatchSize;
  const int raw = raw_channels(kind);

  LatentTensor out(latent_frames, gh, gw, kLatentChannels, cue_name(kind));
  parallel_for(static_cast<std::size_t>(latent_frames), jobs, [&](std::size_t jf) {
    const int j = static_cast<int>(jf);
    const int first = j == 0 ? 0 : kTemporalStride * j - (kTemporalStride - 1);
    const int last = j == 0 ? 0 : kTemporalStride * j;
    std::vector<double> mean, stats;
    for (int f = first; f <= last; ++f) {
      patch_stats(cues, kind, f, gh, gw, stats);
      if (mean.empty()) {
        mean = stats;
      } else {
        for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += stats[i];
      }
    }
    const double inv = 1.0 / (last - first + 1);
    for (auto& v : mean) v *= inv;

    for (int y = 0; y < gh; ++y) {
      for (int x = 0; x < gw; ++x) {
        const double* cell = mean.data() + (static_cast<std::size_t>(y) * gw + x) * raw;
        for (int c = 0; c < kLatentChannels; ++c) {
          double acc = 0.0;
          for (int r = 0; r < raw; ++r) acc += projection.weights(c, r) * cell[r];
          out.at(j, y, x, c) = static_cast<float>(acc);
        }
      }
    }
  });
  return out;
}

LatentTensor encode_cue(const CueSet& cues, CueKind kind, std::uint64_t encoder_seed, int jobs) {
  return encode_cue(cues, kind, ProjectionMatrix::generate(kind, encoder_seed), jobs);
}

LatentTensor concat_channels(const LatentTensor& depth, const LatentTensor& seg, const LatentTensor& keypoint) {
  const std::array<const LatentTensor*, 3> parts{&depth, &seg, &keypoint};
  for (const auto* p : parts) {
    if (!p->same_grid(depth)) fail(ErrorCode::Shape, "latents to concatenate differ in (F, H, W)");
  }
  const int channels = depth.channels + seg.channels + keypoint.channels;
  LatentTensor out(depth.frames, depth.height, depth.width, channels, "concat");
  const std::size_t cells = static_cast<std::size_t>(depth.frames) * depth.height * depth.width;
  for (std::size_t cell = 0; cell < cells; ++cell) {
    float* dst = out.data.data() + cell * channels;
    for (const auto* p : parts) {
      const float* src = p->data.data() + cell * p->channels;
      dst = std::copy(src, src + p->channels, dst);
    }
  }
  return out;
}

std::array<bool, 3> draw_cue_mask(double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) fail(ErrorCode::InvalidArgument, "mask probability must lie in [0, 1]");
  Rng rng(seed);
  std::array<bool, 3> dropped{};
  for (auto& d : dropped) d = rng.uniform() < p;
  return dropped;
}

MaskedCues mask_cues(const CueSet& cues, double p, std::uint64_t seed) {
  MaskedCues out{cues, draw_cue_mask(p, seed)};
  auto zero = [](auto& seq) {
    for (auto& img : seq) std::fill(img.data.begin(), img.data.end(), 0);
  };
  if (out.dropped[0]) zero(out.cues.depth);
  if (out.dropped[1]) zero(out.cues.seg);
  if (out.dropped[2]) zero(out.cues.keypoint);
  return out;
}

InjectionOperator::InjectionOperator(int layers, int control_channels, int hidden_channels,
                                     int base_channels, std::uint64_t seed)
    : control_channels_(control_channels),
      hidden_channels_(hidden_channels),
      base_channels_(base_channels) {
  if (layers < 1) fail(ErrorCode::InvalidArgument, "injection needs at least one layer");
  if (control_channels < 1 || hidden_channels < 1 || base_channels < 1) {
    fail(ErrorCode::InvalidArgument, "channel counts must be positive");
  }
  Rng rng(seed);
  for (int l = 0; l < layers; ++l) {
    const int in = l == 0 ? control_channels : hidden_channels;
    Eigen::MatrixXd b(hidden_channels, in);
    const double scale = 1.0 / std::sqrt(static_cast<double>(in));
    for (int r = 0; r < b.rows(); ++r) {
      for (int c = 0; c < b.cols(); ++c) b(r, c) = scale * rng.normal();
    }
    blocks_.push_back(std::move(b));
    mixes_.push_back(Eigen::MatrixXd::Zero(base_channels, hidden_channels));
  }
}

void InjectionOperator::set_block(int l, Eigen::MatrixXd m) {
  const int in = l == 0 ? control_channels_ : hidden_channels_;
  if (m.rows() != hidden_channels_ || m.cols() != in) fail(ErrorCode::Shape, "block matrix has the wrong shape");
  blocks_.at(l) = std::move(m);
}

void InjectionOperator::set_mix(int l, Eigen::MatrixXd m) {
  if (m.rows() != base_channels_ || m.cols() != hidden_channels_) {
    fail(ErrorCode::Shape, "mix matrix has the wrong shape");
  }
  mixes_.at(l) = std::move(m);
}

bool InjectionOperator::mixes_are_zero() const {
  for (const auto& m : mixes_) {
    if ((m.array() != 0.0).any()) return false;
  }
  return true;
}

namespace {

// 1x1 convolution: out[cell] = m * in[cell].
FeatureMap channel_map(const Eigen::MatrixXd& m, const FeatureMap& in) {
  FeatureMap out(in.frames, in.height, in.width, static_cast<int>(m.rows()), in.cue);
  const std::size_t cells = static_cast<std::size_t>(in.frames) * in.height * in.width;
  for (std::size_t cell = 0; cell < cells; ++cell) {
    const float* src = in.data.data() + cell * in.channels;
    float* dst = out.data.data() + cell * out.channels;
    for (int r = 0; r < m.rows(); ++r) {
      double acc = 0.0;
      for (int c = 0; c < m.cols(); ++c) acc += m(r, c) * src[c];
      dst[r] = static_cast<float>(acc);
    }
  }
  return out;
}

}  // namespace

std::vector<FeatureMap> InjectionOperator::duplicated_features(const LatentTensor& control) const {
  if (control.channels != control_channels_) {
    fail(ErrorCode::Shape, "control latent has " + std::to_string(control.channels) +
                               " channels, operator expects " + std::to_string(control_channels_));
  }
  std::vector<FeatureMap> out;
  out.reserve(blocks_.size());
  for (std::size_t l = 0; l < blocks_.size(); ++l) {
    out.push_back(channel_map(blocks_[l], l == 0 ? control : out.back()));
  }
  return out;
}

std::vector<FeatureMap> InjectionOperator::inject(std::span<const FeatureMap> base,
                                                  const LatentTensor& control) const {
  if (base.size() != blocks_.size()) {
    fail(ErrorCode::Shape, "got " + std::to_string(base.size()) + " base feature maps for " +
                               std::to_string(blocks_.size()) + " injection layers");
  }
  for (const auto& f : base) {
    if (!f.same_grid(control)) fail(ErrorCode::Shape, "base features and control latent differ in (F, H, W)");
    if (f.channels != base_channels_) fail(ErrorCode::Shape, "base features have the wrong channel count");
  }
  const auto dup = duplicated_features(control);
  std::vector<FeatureMap> out;
  out.reserve(base.size());
  for (std::size_t l = 0; l < base.size(); ++l) {
    const FeatureMap delta = channel_map(mixes_[l], dup[l]);
    FeatureMap o = base[l];
    for (std::size_t i = 0; i < o.data.size(); ++i) o.data[i] += delta.data[i];
    out.push_back(std::move(o));
  }
  return out;
}

}  // namespace hoi
