#pragma once

#include <cstddef>
#include <istream>
#include <string>
#include <vector>

#include "stockcast/date.hpp"

namespace stockcast {

// One trading day. Absent fields hold NaN and set `missing`.
struct OhlcvBar {
    Date date{};
    double open = 0.0;
    double high = 0.0;
    double low = 0.0;
    double close = 0.0;
    double adj_close = 0.0;
    double volume = 0.0;
    bool missing = false;

    friend bool operator==(const OhlcvBar&, const OhlcvBar&) = default;
};

struct OhlcvSeries {
    std::string ticker;
    std::vector<OhlcvBar> bars; // strictly ascending by date

    std::size_t size() const noexcept { return bars.size(); }
    bool empty() const noexcept { return bars.empty(); }
};

enum class PriceColumn { Close, AdjClose };

enum class OutlierMode { Remove, Cap };

inline constexpr const char* kOhlcvHeader = "Date,Open,High,Low,Close,Adj Close,Volume";

PriceColumn parse_price_column(const std::string& name);
const char* price_column_name(PriceColumn column);

// Parses the `Date,Open,High,Low,Close,Adj Close,Volume` format. Rows with an
// empty or non-numeric value are kept and flagged missing; an unparseable
// date, a duplicate date or an inconsistent complete bar raises ParseError.
OhlcvSeries parse_ohlcv_csv(std::istream& in, const std::string& ticker);
OhlcvSeries load_ohlcv_csv(const std::string& path, const std::string& ticker);

void write_ohlcv_csv(std::ostream& out, const OhlcvSeries& series);

OhlcvSeries drop_missing(const OhlcvSeries& series);

// Single-pass z-score treatment on one price column using the pre-treatment
// mean and sample standard deviation of the complete bars.
OhlcvSeries treat_outliers(const OhlcvSeries& series, double threshold = 3.0,
                           OutlierMode mode = OutlierMode::Cap,
                           PriceColumn column = PriceColumn::Close);

std::vector<double> price_values(const OhlcvSeries& series, PriceColumn column);
std::vector<Date> bar_dates(const OhlcvSeries& series);

} // namespace stockcast
