#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rydberg::csv {

/// Shortest decimal string that parses back to exactly `value`.
std::string format_double(double value);

/// Strict parse of a full field. Throws std::invalid_argument.
double parse_double(std::string_view field);

/// Comma-joined row with trailing LF.
std::string format_row(std::span<const double> values);

std::vector<std::string_view> split_fields(std::string_view line);

/// Lines without their LF (CR tolerated). A trailing empty line is dropped.
std::vector<std::string_view> split_lines(std::string_view text);

} // namespace rydberg::csv
