#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace sentcast::csv {

/// Splits one CSV line on commas. Quoting is not supported: every format in
/// this project is plain numeric/identifier data.
std::vector<std::string> split(std::string_view line);

std::string_view trim(std::string_view s);

/// Strict double parse of the whole field; false on trailing junk.
bool parse_double(std::string_view field, double& out);

/// Shortest representation that round-trips a double exactly.
std::string format_double(double v);

/// Reads a file into lines, dropping a trailing '\r' from each.
std::vector<std::string> read_lines(const std::string& path);

}  // namespace sentcast::csv
