#include "stockcast/market_data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "stockcast/errors.hpp"
#include "stockcast/text.hpp"

namespace stockcast {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double& column_ref(OhlcvBar& bar, PriceColumn column) {
    return column == PriceColumn::Close ? bar.close : bar.adj_close;
}

double column_value(const OhlcvBar& bar, PriceColumn column) {
    return column == PriceColumn::Close ? bar.close : bar.adj_close;
}

void validate_bar(const OhlcvBar& bar, std::size_t line) {
    for (double p : {bar.open, bar.high, bar.low, bar.close, bar.adj_close}) {
        if (!(p > 0.0) || !std::isfinite(p)) throw ParseError(line, "prices must be positive and finite");
    }
    if (!(bar.volume >= 0.0) || !std::isfinite(bar.volume)) {
        throw ParseError(line, "volume must be non-negative");
    }
    if (bar.low > std::min(bar.open, bar.close) || bar.high < std::max(bar.open, bar.close)) {
        throw ParseError(line, "bar violates low <= open,close <= high");
    }
}

} // namespace

PriceColumn parse_price_column(const std::string& name) {
    if (name == "close" || name == "Close") return PriceColumn::Close;
    if (name == "adj_close" || name == "Adj Close") return PriceColumn::AdjClose;
    throw ConfigError("unknown price column '" + name + "' (expected close or adj_close)");
}

const char* price_column_name(PriceColumn column) {
    return column == PriceColumn::Close ? "close" : "adj_close";
}

OhlcvSeries parse_ohlcv_csv(std::istream& in, const std::string& ticker) {
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) {
            have_header = true;
            break;
        }
    }
    if (!have_header) throw EmptyInputError("empty OHLCV input for " + ticker);

    // Tolerate a UTF-8 BOM in front of the header.
    std::string_view header = trim(line);
    if (header.starts_with("\xEF\xBB\xBF")) header.remove_prefix(3);
    if (header != kOhlcvHeader) {
        throw SchemaError("unexpected OHLCV header '" + std::string(header) + "', expected '" +
                          kOhlcvHeader + "'");
    }

    OhlcvSeries series;
    series.ticker = ticker;
    std::vector<std::size_t> lines;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view row = trim(line);
        if (row.empty()) continue;
        const auto fields = split_csv(row);
        if (fields.size() != 7) {
            throw ParseError(line_no, "expected 7 fields, found " + std::to_string(fields.size()));
        }
        const auto date = parse_date(trim(fields[0]));
        if (!date) throw ParseError(line_no, "unparseable date '" + std::string(fields[0]) + "'");

        OhlcvBar bar;
        bar.date = *date;
        double* slots[] = {&bar.open, &bar.high, &bar.low, &bar.close, &bar.adj_close, &bar.volume};
        for (std::size_t i = 0; i < 6; ++i) {
            const auto value = parse_double(fields[i + 1]);
            if (value && std::isfinite(*value)) {
                *slots[i] = *value;
            } else {
                *slots[i] = kNaN;
                bar.missing = true;
            }
        }
        if (!bar.missing) validate_bar(bar, line_no);
        series.bars.push_back(bar);
        lines.push_back(line_no);
    }

    std::vector<std::size_t> order(series.bars.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return series.bars[a].date < series.bars[b].date;
    });
    std::vector<OhlcvBar> sorted;
    sorted.reserve(order.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
        const auto& bar = series.bars[order[k]];
        if (!sorted.empty() && sorted.back().date == bar.date) {
            throw ParseError(lines[order[k]], "duplicate date " + format_date(bar.date));
        }
        sorted.push_back(bar);
    }
    series.bars = std::move(sorted);
    return series;
}

OhlcvSeries load_ohlcv_csv(const std::string& path, const std::string& ticker) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open prices file '" + path + "'");
    try {
        return parse_ohlcv_csv(in, ticker);
    } catch (const ParseError& e) {
        throw e.with_file(path);
    }
}

void write_ohlcv_csv(std::ostream& out, const OhlcvSeries& series) {
    const auto cell = [](double v) { return std::isnan(v) ? std::string() : format_double(v); };
    out << kOhlcvHeader << '\n';
    for (const auto& bar : series.bars) {
        out << format_date(bar.date) << ',' << cell(bar.open) << ',' << cell(bar.high) << ','
            << cell(bar.low) << ',' << cell(bar.close) << ',' << cell(bar.adj_close) << ','
            << cell(bar.volume) << '\n';
    }
}

OhlcvSeries drop_missing(const OhlcvSeries& series) {
    OhlcvSeries out;
    out.ticker = series.ticker;
    std::copy_if(series.bars.begin(), series.bars.end(), std::back_inserter(out.bars),
                 [](const OhlcvBar& bar) { return !bar.missing; });
    if (out.bars.empty()) throw EmptyInputError("no complete bars in series " + series.ticker);
    return out;
}

OhlcvSeries treat_outliers(const OhlcvSeries& series, double threshold, OutlierMode mode,
                           PriceColumn column) {
    if (!(threshold > 0.0)) throw DomainError("outlier threshold must be positive");
    if (series.size() < 2) throw InsufficientDataError("outlier treatment needs at least 2 bars");

    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& bar : series.bars) {
        const double v = column_value(bar, column);
        if (std::isnan(v)) continue;
        sum += v;
        ++n;
    }
    if (n < 2) return series;
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (const auto& bar : series.bars) {
        const double v = column_value(bar, column);
        if (!std::isnan(v)) ss += (v - mean) * (v - mean);
    }
    const double stddev = std::sqrt(ss / static_cast<double>(n - 1));
    if (stddev == 0.0) return series;

    OhlcvSeries out;
    out.ticker = series.ticker;
    out.bars.reserve(series.size());
    for (const auto& bar : series.bars) {
        const double v = column_value(bar, column);
        const double z = (v - mean) / stddev;
        if (std::isnan(v) || std::abs(z) <= threshold) {
            out.bars.push_back(bar);
        } else if (mode == OutlierMode::Cap) {
            OhlcvBar capped = bar;
            column_ref(capped, column) = z > 0 ? mean + threshold * stddev : mean - threshold * stddev;
            out.bars.push_back(capped);
        }
    }
    return out;
}

std::vector<double> price_values(const OhlcvSeries& series, PriceColumn column) {
    std::vector<double> out;
    out.reserve(series.size());
    for (const auto& bar : series.bars) out.push_back(column_value(bar, column));
    return out;
}

std::vector<Date> bar_dates(const OhlcvSeries& series) {
    std::vector<Date> out;
    out.reserve(series.size());
    for (const auto& bar : series.bars) out.push_back(bar.date);
    return out;
}

} // namespace stockcast
