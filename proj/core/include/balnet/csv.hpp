#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace balnet::csv {

struct Row {
  std::size_t line = 0;  // 1-based line number in the source file
  std::vector<std::string> cells;
};

struct Table {
  std::vector<std::string> header;
  std::vector<Row> rows;
};

// Parses RFC-4180-style CSV: comma separated, optional double quotes with ""
// escapes, LF or CRLF line endings. The first non-empty line is the header.
Table parse(std::string_view text);
Table read(const std::filesystem::path& path);

// Quotes a cell only when it contains a comma, quote or newline.
std::string escape(std::string_view cell);
std::string join(const std::vector<std::string>& cells);

// Fixed 12-significant-digit decimal rendering used by every analysis output.
std::string format_number(double value);
// Shortest representation that parses back to the identical double.
std::string format_exact(double value);

// Marker written for undefined values in CSV outputs.
inline constexpr std::string_view kNull = "NA";

std::string read_file(const std::filesystem::path& path);
// Writes to a sibling temporary file, then renames over the destination.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace balnet::csv
