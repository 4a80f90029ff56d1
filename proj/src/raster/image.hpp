#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace hoi {

// Row-major, interleaved channels.
template <class T>
struct Image {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<T> data;

  Image() = default;
  Image(int w, int h, int c = 1, T fill = T{})
      : width(w), height(h), channels(c), data(static_cast<std::size_t>(w) * h * c, fill) {}

  T& at(int row, int col, int c = 0) {
    return data[(static_cast<std::size_t>(row) * width + col) * channels + c];
  }
  const T& at(int row, int col, int c = 0) const {
    return data[(static_cast<std::size_t>(row) * width + col) * channels + c];
  }
  bool same_shape(const Image& o) const {
    return width == o.width && height == o.height && channels == o.channels;
  }
  bool operator==(const Image& o) const { return same_shape(o) && data == o.data; }
};

using DepthMap = Image<float>;            // meters, 0 = background
using SegMap = Image<std::uint8_t>;       // 0 background, 1 hand, 2+ objects
using KeypointImage = Image<std::uint8_t>;  // 3 channels
using Image8 = Image<std::uint8_t>;

using Rgb = std::array<std::uint8_t, 3>;

}  // namespace hoi
