#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace sensemt::io {

/// Writes via a sibling temp file and rename, so readers never observe a
/// partial file.
void write_atomic(const std::filesystem::path& path, std::string_view contents);

std::string read_file(const std::filesystem::path& path);

/// Splits on '\n'; a trailing '\r' is dropped. A final empty line is not
/// reported.
std::vector<std::string> split_lines(std::string_view contents);

}  // namespace sensemt::io
