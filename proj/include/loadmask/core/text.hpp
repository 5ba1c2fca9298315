#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace loadmask::text {

/// Shortest decimal form that parses back to the identical double.
std::string format_double(double v);

/// Strict parse: the whole field must be a number. Throws ValidationError.
double parse_double(std::string_view field);
std::int64_t parse_int(std::string_view field);

std::vector<std::string_view> split(std::string_view line, char sep);
std::string_view trim(std::string_view s);

std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temp file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::string hex64(std::uint64_t v);

}  // namespace loadmask::text
