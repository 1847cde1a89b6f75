#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace hawkes {

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);
/// Strict full-string parse; throws Format on failure.
double parse_double(std::string_view text);

std::string read_file(const std::filesystem::path& path);
/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace hawkes
