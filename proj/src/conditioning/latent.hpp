#pragma once

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace hoi {

// Dense FHWC float tensor. `cue` records what produced it ("depth", "seg",
// "keypoint", "concat", or free text for feature maps).
struct LatentTensor {
  int frames = 0;
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<float> data;
  std::string cue;

  LatentTensor() = default;
  LatentTensor(int f, int h, int w, int c, std::string tag = {})
      : frames(f), height(h), width(w), channels(c),
        data(static_cast<std::size_t>(f) * h * w * c, 0.0f), cue(std::move(tag)) {}

  std::size_t index(int f, int h, int w, int c) const {
    return ((static_cast<std::size_t>(f) * height + h) * width + w) * channels + c;
  }
  float& at(int f, int h, int w, int c) { return data[index(f, h, w, c)]; }
  float at(int f, int h, int w, int c) const { return data[index(f, h, w, c)]; }

  bool same_grid(const LatentTensor& o) const {
    return frames == o.frames && height == o.height && width == o.width;
  }
  std::vector<int> shape() const { return {frames, height, width, channels}; }
};

using FeatureMap = LatentTensor;

// Writes <stem>.f32 (raw little-endian float32) and <stem>.json
// {"shape": [F, H, W, C], "order": "FHWC", "cue": ...} merged with `extra`.
void save_latent(const LatentTensor& t, const std::string& stem, const nlohmann::json& extra);
void save_latent(const LatentTensor& t, const std::string& stem);
LatentTensor load_latent(const std::string& stem);

void write_f32_blob(const std::string& path, const std::vector<float>& values);
std::vector<float> read_f32_blob(const std::string& path);

}  // namespace hoi
