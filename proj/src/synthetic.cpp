#include "stockcast/synthetic.hpp"

#include <cmath>
#include <numbers>

#include "stockcast/errors.hpp"
#include "stockcast/rng.hpp"

namespace stockcast {

namespace {

const Date kStart{std::chrono::year{2024}, std::chrono::month{1}, std::chrono::day{2}};

} // namespace

std::vector<Date> business_days(Date start, std::size_t count) {
    std::vector<Date> out;
    out.reserve(count);
    Date d = start;
    while (out.size() < count) {
        if (!is_weekend(d)) out.push_back(d);
        d = add_days(d, 1);
    }
    return out;
}

OhlcvSeries flat_bars(const std::string& ticker, std::span<const Date> dates, std::span<const double> closes) {
    if (dates.size() != closes.size()) throw ShapeError("dates and closes differ in length");
    OhlcvSeries series;
    series.ticker = ticker;
    for (std::size_t i = 0; i < dates.size(); ++i) {
        const double p = closes[i];
        series.bars.push_back({dates[i], p, p, p, p, p, 1'000'000.0, false});
    }
    return series;
}

SyntheticData sine_series(std::size_t length, double period) {
    if (length < 2) throw InsufficientDataError("synthetic series needs at least 2 points");
    SyntheticData out;
    const auto dates = business_days(kStart, length);
    std::vector<double> close(length);
    for (std::size_t t = 0; t < length; ++t) {
        close[t] = 100.0 + 10.0 * std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / period);
    }
    out.prices = flat_bars("SINE", dates, close);
    out.frame.dates = dates;
    out.frame.add_column("close", close);
    return out;
}

SyntheticData sentiment_coupled_series(std::size_t length, std::uint64_t seed, double noise) {
    if (length < 2) throw InsufficientDataError("synthetic series needs at least 2 points");
    Rng rng(seed);
    const auto dates = business_days(kStart, length);
    std::vector<double> close(length), sentiment(length);
    double x = 0.4;
    for (std::size_t t = 0; t < length; ++t) {
        const double s = rng.uniform();
        close[t] = 50.0 + 100.0 * x;
        sentiment[t] = 2.0 * s - 1.0;
        x = 0.5 * x + 0.4 * s + noise * rng.normal();
    }
    SyntheticData out;
    out.prices = flat_bars("SENT", dates, close);
    out.frame.dates = dates;
    out.frame.add_column("close", close);
    out.frame.add_column("sentiment", sentiment);
    return out;
}

} // namespace stockcast
