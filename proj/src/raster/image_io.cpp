#include "raster/image_io.hpp"

#include "common/error.hpp"

#include <png.h>

#include <bit>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <vector>

namespace hoi {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::string& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) fail(ErrorCode::Io, std::string("cannot open '") + path + "' for " + (mode[0] == 'r' ? "reading" : "writing"));
  return f;
}

// libpng reports errors by longjmp; keep every object with a destructor out
// of these two functions.
bool png_write_raw(std::FILE* fp, int width, int height, int bit_depth, int color_type,
                   const png_color* palette, int palette_size, png_bytep* rows) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, width, height, bit_depth, color_type, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  if (palette) png_set_PLTE(png, info, palette, palette_size);
  png_write_info(png, info);
  if (bit_depth == 16) png_set_swap(png);  // rows are host (little-endian) order
  png_write_image(png, rows);
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

struct PngHeader {
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int bit_depth = 0;
  int color_type = 0;
};

enum class ReadMode { Gray16, Indexed8, Color8 };

// Two passes: the first call reads the header only (rows == nullptr), the
// second decodes into caller-owned rows.
bool png_read_raw(std::FILE* fp, ReadMode mode, PngHeader* header, int* channels, png_bytep* rows) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_init_io(png, fp);
  png_read_info(png, info);
  header->width = png_get_image_width(png, info);
  header->height = png_get_image_height(png, info);
  header->bit_depth = png_get_bit_depth(png, info);
  header->color_type = png_get_color_type(png, info);

  switch (mode) {
    case ReadMode::Gray16:
      if (header->bit_depth == 16) png_set_swap(png);
      break;
    case ReadMode::Indexed8:
      if (header->bit_depth < 8) png_set_packing(png);
      break;
    case ReadMode::Color8:
      if (header->color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
      if (header->color_type == PNG_COLOR_TYPE_GRAY && header->bit_depth < 8) {
        png_set_expand_gray_1_2_4_to_8(png);
      }
      if (header->bit_depth == 16) png_set_strip_16(png);
      png_set_strip_alpha(png);
      break;
  }
  png_read_update_info(png, info);
  *channels = png_get_channels(png, info);
  if (rows) {
    png_read_image(png, rows);
    png_read_end(png, nullptr);
  }
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

void write_png(const std::string& path, int width, int height, int bit_depth, int color_type,
               std::vector<std::uint8_t>& bytes, std::size_t row_bytes,
               const std::vector<png_color>* palette = nullptr) {
  std::vector<png_bytep> rows(height);
  for (int r = 0; r < height; ++r) rows[r] = bytes.data() + r * row_bytes;
  FilePtr fp = open_file(path, "wb");
  const bool ok = png_write_raw(fp.get(), width, height, bit_depth, color_type,
                                palette ? palette->data() : nullptr,
                                palette ? static_cast<int>(palette->size()) : 0, rows.data());
  if (!ok) fail(ErrorCode::Io, "failed to encode PNG '" + path + "'");
}

template <class Pixel>
Image<Pixel> read_png(const std::string& path, ReadMode mode, int* out_channels, PngHeader* out_header) {
  PngHeader header;
  int channels = 0;
  {
    FilePtr fp = open_file(path, "rb");
    if (!png_read_raw(fp.get(), mode, &header, &channels, nullptr)) {
      fail(ErrorCode::Schema, "not a readable PNG: '" + path + "'");
    }
  }
  const int bytes_per_sample = (mode == ReadMode::Gray16 && header.bit_depth == 16) ? 2 : 1;
  const std::size_t row_bytes = static_cast<std::size_t>(header.width) * channels * bytes_per_sample;
  std::vector<std::uint8_t> bytes(row_bytes * header.height);
  std::vector<png_bytep> rows(header.height);
  for (png_uint_32 r = 0; r < header.height; ++r) rows[r] = bytes.data() + r * row_bytes;
  {
    FilePtr fp = open_file(path, "rb");
    if (!png_read_raw(fp.get(), mode, &header, &channels, rows.data())) {
      fail(ErrorCode::Schema, "corrupt PNG: '" + path + "'");
    }
  }
  Image<Pixel> img(static_cast<int>(header.width), static_cast<int>(header.height), channels);
  if (bytes_per_sample == 2) {
    for (std::size_t i = 0; i < img.data.size(); ++i) {
      std::uint16_t v;
      std::memcpy(&v, bytes.data() + 2 * i, 2);
      img.data[i] = static_cast<Pixel>(v);
    }
  } else {
    for (std::size_t i = 0; i < img.data.size(); ++i) img.data[i] = static_cast<Pixel>(bytes[i]);
  }
  *out_channels = channels;
  *out_header = header;
  return img;
}

void store_le16(std::uint8_t* p, std::uint16_t v) {
  p[0] = static_cast<std::uint8_t>(v & 0xff);
  p[1] = static_cast<std::uint8_t>(v >> 8);
}

}  // namespace

void write_depth_png(const DepthMap& depth, const std::string& path) {
  std::vector<std::uint8_t> bytes(depth.data.size() * 2);
  for (std::size_t i = 0; i < depth.data.size(); ++i) {
    const double units = std::round(static_cast<double>(depth.data[i]) / kDepthPngUnitM);
    const auto v = static_cast<std::uint16_t>(std::clamp(units, 0.0, 65535.0));
    store_le16(bytes.data() + 2 * i, v);
  }
  write_png(path, depth.width, depth.height, 16, PNG_COLOR_TYPE_GRAY, bytes,
            static_cast<std::size_t>(depth.width) * 2);
}

DepthMap read_depth_png(const std::string& path) {
  int channels = 0;
  PngHeader header;
  const auto raw = read_png<std::uint16_t>(path, ReadMode::Gray16, &channels, &header);
  if (channels != 1 || header.bit_depth != 16) {
    fail(ErrorCode::Schema, "depth PNG must be 16-bit grayscale: '" + path + "'");
  }
  DepthMap out(raw.width, raw.height, 1);
  for (std::size_t i = 0; i < raw.data.size(); ++i) {
    out.data[i] = static_cast<float>(raw.data[i] * kDepthPngUnitM);
  }
  return out;
}

void write_depth_pfm(const DepthMap& depth, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write '" + path + "'");
  out << "Pf\n" << depth.width << ' ' << depth.height << "\n-1\n";
  std::vector<std::uint8_t> row(static_cast<std::size_t>(depth.width) * 4);
  for (int r = depth.height - 1; r >= 0; --r) {
    for (int c = 0; c < depth.width; ++c) {
      const auto bits = std::bit_cast<std::uint32_t>(depth.at(r, c));
      for (int b = 0; b < 4; ++b) row[4 * c + b] = static_cast<std::uint8_t>(bits >> (8 * b));
    }
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
  }
}

DepthMap read_depth_pfm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open '" + path + "'");
  std::string magic;
  int w = 0, h = 0;
  double scale = 0.0;
  in >> magic >> w >> h >> scale;
  in.get();
  if (magic != "Pf" || w <= 0 || h <= 0 || scale >= 0.0) {
    fail(ErrorCode::Schema, "expected a little-endian single-channel PFM: '" + path + "'");
  }
  DepthMap out(w, h, 1);
  std::vector<std::uint8_t> row(static_cast<std::size_t>(w) * 4);
  for (int r = h - 1; r >= 0; --r) {
    if (!in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size()))) {
      fail(ErrorCode::Schema, "truncated PFM: '" + path + "'");
    }
    for (int c = 0; c < w; ++c) {
      std::uint32_t bits = 0;
      for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(row[4 * c + b]) << (8 * b);
      out.at(r, c) = std::bit_cast<float>(bits);
    }
  }
  return out;
}

void write_seg_png(const SegMap& seg, const std::string& path) {
  std::vector<png_color> palette(256);
  palette[0] = {0, 0, 0};
  palette[1] = {230, 180, 150};
  for (int i = 2; i < 256; ++i) {
    // Spread object labels over distinct hues.
    palette[i] = {static_cast<png_byte>((i * 97) % 256), static_cast<png_byte>((i * 57 + 80) % 256),
                  static_cast<png_byte>((i * 151 + 40) % 256)};
  }
  std::vector<std::uint8_t> bytes(seg.data.begin(), seg.data.end());
  write_png(path, seg.width, seg.height, 8, PNG_COLOR_TYPE_PALETTE, bytes,
            static_cast<std::size_t>(seg.width), &palette);
}

SegMap read_seg_png(const std::string& path) {
  int channels = 0;
  PngHeader header;
  auto img = read_png<std::uint8_t>(path, ReadMode::Indexed8, &channels, &header);
  const bool indexed = header.color_type == PNG_COLOR_TYPE_PALETTE ||
                       (header.color_type == PNG_COLOR_TYPE_GRAY && header.bit_depth <= 8);
  if (!indexed || channels != 1) fail(ErrorCode::Schema, "segmentation PNG must be 8-bit palette or gray: '" + path + "'");
  return img;
}

void write_rgb_png(const Image8& rgb, const std::string& path) {
  if (rgb.channels != 3) fail(ErrorCode::Shape, "RGB PNG needs 3 channels");
  std::vector<std::uint8_t> bytes(rgb.data.begin(), rgb.data.end());
  write_png(path, rgb.width, rgb.height, 8, PNG_COLOR_TYPE_RGB, bytes,
            static_cast<std::size_t>(rgb.width) * 3);
}

Image8 read_png8(const std::string& path) {
  int channels = 0;
  PngHeader header;
  return read_png<std::uint8_t>(path, ReadMode::Color8, &channels, &header);
}

}  // namespace hoi
