#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace stockcast {

// Shortest decimal representation that parses back to the identical double.
std::string format_double(double value);

// Whole-field decimal parse; leading/trailing garbage or an empty field is a failure.
std::optional<double> parse_double(std::string_view text);

std::string_view trim(std::string_view text);

// Comma split without quoting support; the CSV formats handled here never quote.
std::vector<std::string_view> split_csv(std::string_view line);

} // namespace stockcast
