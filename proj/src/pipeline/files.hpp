#pragma once

#include "common/error.hpp"

#include <algorithm>
#include <filesystem>
#include <string>
#include <vector>

namespace hoi {

// Regular files in `dir` with the given extension, sorted by name.
inline std::vector<std::string> list_frame_files(const std::string& dir, const std::string& ext) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) fail(ErrorCode::Io, "not a directory: '" + dir + "'");
  std::vector<std::string> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ext) out.push_back(entry.path().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline void ensure_directory(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::Io, "cannot create directory '" + dir + "': " + ec.message());
}

}  // namespace hoi
