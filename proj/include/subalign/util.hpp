#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace subalign {

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view content);

/// Splits on '\n', stripping a trailing '\r' from each line.
std::vector<std::string_view> split_lines(std::string_view text);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split_ws(std::string_view s);

std::optional<double> try_parse_double(std::string_view s);
std::optional<long long> try_parse_int(std::string_view s);

/// Shortest decimal form that round-trips the exact double.
std::string format_double(double v);

}  // namespace subalign
