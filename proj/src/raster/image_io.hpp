#pragma once

#include "raster/image.hpp"

#include <cstdint>
#include <string>

namespace hoi {

// Depth in 0.1 mm units, 16-bit grayscale; 0 stays background and values
// past 6.5535 m saturate.
inline constexpr double kDepthPngUnitM = 1e-4;

void write_depth_png(const DepthMap& depth, const std::string& path);
DepthMap read_depth_png(const std::string& path);

// Portable float map, little-endian float32, rows stored bottom-up.
void write_depth_pfm(const DepthMap& depth, const std::string& path);
DepthMap read_depth_pfm(const std::string& path);

// 8-bit palette PNG; the pixel value is the label.
void write_seg_png(const SegMap& seg, const std::string& path);
SegMap read_seg_png(const std::string& path);

void write_rgb_png(const Image8& rgb, const std::string& path);

// Any 8-bit PNG as 1 (gray) or 3 (color) channels; palettes are expanded,
// alpha is dropped, 16-bit samples are reduced to 8.
Image8 read_png8(const std::string& path);

}  // namespace hoi
