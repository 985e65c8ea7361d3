#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace maintcast {

/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

std::vector<std::string> split(std::string_view text, char sep);
std::string_view trim(std::string_view text);

/// Writes through a temporary sibling and renames into place, so a failed
/// run never leaves a truncated file behind.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

}  // namespace maintcast
