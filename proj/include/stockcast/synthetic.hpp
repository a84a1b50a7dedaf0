#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

#include "stockcast/features.hpp"
#include "stockcast/market_data.hpp"

namespace stockcast {

struct SyntheticData {
    OhlcvSeries prices;
    FeatureFrame frame; // close (+ sentiment for the coupled generator)
};

// Weekday calendar starting at `start`.
std::vector<Date> business_days(Date start, std::size_t count);

// Flat bars (open = high = low = close = adj close) around a close series.
OhlcvSeries flat_bars(const std::string& ticker, std::span<const Date> dates, std::span<const double> closes);

// Noiseless sine: close_t = 100 + 10 sin(2 pi t / period).
SyntheticData sine_series(std::size_t length, double period = 50.0);

// Normalized close x follows x_{t+1} = 0.5 x_t + 0.4 s_t + noise * N(0, 1)
// with s_t ~ U[0, 1]; close = 50 + 100 x and the stored sentiment is the
// compound-style 2 s - 1, so it carries next-day information.
SyntheticData sentiment_coupled_series(std::size_t length, std::uint64_t seed, double noise = 0.01);

} // namespace stockcast
