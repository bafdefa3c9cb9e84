#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace trendkit {

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

/// Fixed-point rendering with the given number of decimals.
std::string format_fixed(double value, int decimals);

/// Writes `content` to a sibling temporary file and renames it over `path`,
/// so readers never observe a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

} // namespace trendkit
