#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace flowopt {

/// Shortest decimal representation that parses back to the identical double.
std::string format_double(double value);

/// Fixed-point formatting for presentation output (CLI tables, rounded CSVs).
std::string format_fixed(double value, int decimals);

/// Strict double parse of a whole field; nullopt on any trailing garbage.
std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_int(std::string_view text);

/// Splits one CSV line on commas. No quoting; none of our fields contain commas.
std::vector<std::string_view> split_csv_line(std::string_view line);

/// Splits text into lines on '\n', dropping a trailing '\r' from each.
std::vector<std::string_view> split_lines(std::string_view text);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

} // namespace flowopt
