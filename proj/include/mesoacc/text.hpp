#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace mesoacc {

// Shortest round-trip decimal form (to_chars); "inf"/"nan" pass through.
std::string format_double(double v);

// Strict full-token parses; throw std::invalid_argument on anything else.
double parse_double(std::string_view s);
long parse_long(std::string_view s);
bool parse_on_off(std::string_view s);

std::vector<std::string_view> split(std::string_view s, char sep);
std::string_view trim(std::string_view s);

}  // namespace mesoacc
