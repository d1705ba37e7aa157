#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace kneecast::io {

/// Writes `bytes` to a sibling temp file, then renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

/// Whole-file read; DataError when the file cannot be opened.
std::string read_file(const std::filesystem::path& path);

}  // namespace kneecast::io
