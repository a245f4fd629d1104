#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace arspi::csv {

// Strips leading/trailing spaces and tabs.
std::string_view trim(std::string_view text);

// Splits one CSV line on commas; fields are trimmed. No quoting support:
// every format written or read here is plain comma-delimited.
std::vector<std::string_view> split_line(std::string_view line);

// Shortest decimal string that round-trips to the same double.
std::string format_double(double value);

// Strict double parse of a whole field; throws ParseError::MalformedRow on
// failure (row is the 1-based line number reported in the message).
double parse_double_field(std::string_view field, long row);

// FNV-1a 64-bit hash, rendered as 16 lowercase hex digits.
std::uint64_t fnv1a64(std::string_view bytes);
std::string fnv1a64_hex(std::string_view bytes);

// Whole-file helpers; throw IoError on failure.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace arspi::csv
