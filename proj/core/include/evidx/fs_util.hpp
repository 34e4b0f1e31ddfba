#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace evidx {

/// Writes via a sibling temp file and rename; parent directories are created.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Throws InputError when the file cannot be read.
std::string read_file(const std::filesystem::path& path);

}  // namespace evidx
