#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mlwin {

// Locale-independent shortest round-trip formatting and parsing.
std::string format_double(double v);
std::optional<double> parse_double(std::string_view s);
// Comma-separated list; empty input is an error.
std::optional<std::vector<double>> parse_double_list(std::string_view s);

}  // namespace mlwin
