#include "conditioning/latent.hpp"

#include "common/error.hpp"

#include <nlohmann/json.hpp>

#include <bit>
#include <fstream>

namespace hoi {

using nlohmann::json;

void write_f32_blob(const std::string& path, const std::vector<float>& values) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write '" + path + "'");
  std::vector<std::uint8_t> bytes(values.size() * 4);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto bits = std::bit_cast<std::uint32_t>(values[i]);
    for (int b = 0; b < 4; ++b) bytes[4 * i + b] = static_cast<std::uint8_t>(bits >> (8 * b));
  }
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::Io, "short write to '" + path + "'");
}

std::vector<float> read_f32_blob(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() % 4 != 0) fail(ErrorCode::Schema, "'" + path + "' is not a float32 blob");
  std::vector<float> out(bytes.size() / 4);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(bytes[4 * i + b]) << (8 * b);
    out[i] = std::bit_cast<float>(bits);
  }
  return out;
}

void save_latent(const LatentTensor& t, const std::string& stem, const json& extra) {
  write_f32_blob(stem + ".f32", t.data);
  json side = extra.is_object() ? extra : json::object();
  side["shape"] = t.shape();
  side["order"] = "FHWC";
  side["cue"] = t.cue;
  std::ofstream out(stem + ".json");
  if (!out) fail(ErrorCode::Io, "cannot write '" + stem + ".json'");
  out << side.dump(2) << '\n';
}

void save_latent(const LatentTensor& t, const std::string& stem) { save_latent(t, stem, json::object()); }

LatentTensor load_latent(const std::string& stem) {
  std::ifstream in(stem + ".json");
  if (!in) fail(ErrorCode::Io, "cannot open '" + stem + ".json'");
  json side;
  try {
    in >> side;
    const auto shape = side.at("shape").get<std::vector<int>>();
    if (shape.size() != 4 || side.at("order").get<std::string>() != "FHWC") {
      fail(ErrorCode::Schema, stem + ".json: expected a 4-D FHWC shape");
    }
    LatentTensor t(shape[0], shape[1], shape[2], shape[3], side.value("cue", std::string{}));
    auto values = read_f32_blob(stem + ".f32");
    if (values.size() != t.data.size()) {
      fail(ErrorCode::Shape, stem + ".f32 holds " + std::to_string(values.size()) +
                                 " values, sidecar shape needs " + std::to_string(t.data.size()));
    }
    t.data = std::move(values);
    return t;
  } catch (const json::exception& e) {
    fail(ErrorCode::Schema, stem + ".json: " + e.what());
  }
}

}  // namespace hoi
