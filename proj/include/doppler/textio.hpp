#pragma once

// Helpers shared by the line-oriented text file formats.

#include "doppler/errors.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace doppler::textio {

// 17 significant digits; parses back to the identical double.
[[nodiscard]] std::string format_double(double value);
[[nodiscard]] double parse_double(std::string_view token);
[[nodiscard]] long long parse_int(std::string_view token);

[[nodiscard]] std::uint64_t fnv1a(std::string_view data);
[[nodiscard]] std::string hex64(std::uint64_t value);

[[nodiscard]] std::vector<std::string> split_ws(std::string_view line);

// Reads the whole file; throws Error(IoError) naming the path.
[[nodiscard]] std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

// Appends "checksum <hex>\n" covering everything before it.
[[nodiscard]] std::string seal(std::string body);
// Verifies and strips the trailing checksum line; throws Error(code) when the
// line is missing or the digest does not match.
[[nodiscard]] std::string unseal(const std::string& contents, ErrorCode code);

} // namespace doppler::textio
