#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace stockcast {

using Date = std::chrono::year_month_day;

// Strict ISO 8601 calendar date, `YYYY-MM-DD`. Returns nullopt on any deviation
// or on an invalid calendar day (e.g. 2023-02-30).
std::optional<Date> parse_date(std::string_view text);

std::string format_date(const Date& date);

Date add_days(const Date& date, int days);

bool is_weekend(const Date& date);

} // namespace stockcast
