#include <cmath>
#include <sstream>

#include "doctest.h"
#include "stockcast/errors.hpp"
#include "stockcast/market_data.hpp"
#include "stockcast/rng.hpp"
#include "stockcast/synthetic.hpp"

using namespace stockcast;

namespace {

OhlcvSeries parse(const std::string& text) {
    std::istringstream in(text);
    return parse_ohlcv_csv(in, "TEST");
}

const std::string kHeader = std::string(kOhlcvHeader) + "\n";

OhlcvSeries series_from_closes(const std::vector<double>& closes) {
    const auto dates = business_days(*parse_date("2023-01-02"), closes.size());
    return flat_bars("TEST", dates, closes);
}

} // namespace

TEST_CASE("parse a single valid row") {
    const auto s = parse(kHeader + "2023-03-01,10.5,11,10,10.75,10.7,12345\n");
    REQUIRE(s.size() == 1);
    const auto& b = s.bars[0];
    CHECK(format_date(b.date) == "2023-03-01");
    CHECK(b.open == 10.5);
    CHECK(b.high == 11.0);
    CHECK(b.low == 10.0);
    CHECK(b.close == 10.75);
    CHECK(b.adj_close == 10.7);
    CHECK(b.volume == 12345.0);
    CHECK_FALSE(b.missing);
    CHECK(s.ticker == "TEST");
}

TEST_CASE("rows out of order are sorted") {
    const auto s = parse(kHeader + "2023-03-02,1,1,1,1,1,1\n2023-03-01,2,2,2,2,2,2\n");
    REQUIRE(s.size() == 2);
    CHECK(format_date(s.bars[0].date) == "2023-03-01");
    CHECK(s.bars[0].close == 2.0);
    CHECK(format_date(s.bars[1].date) == "2023-03-02");
}

TEST_CASE("blank close is flagged missing and dropped") {
    const auto s = parse(kHeader +
                         "2023-03-01,1,1,1,1,1,1\n"
                         "2023-03-02,1,1,1,,1,1\n"
                         "2023-03-03,1,1,1,1,1,abc\n");
    REQUIRE(s.size() == 3);
    CHECK_FALSE(s.bars[0].missing);
    CHECK(s.bars[1].missing);
    CHECK(std::isnan(s.bars[1].close));
    CHECK(s.bars[2].missing);
    const auto d = drop_missing(s);
    REQUIRE(d.size() == 1);
    CHECK(format_date(d.bars[0].date) == "2023-03-01");
}

TEST_CASE("parse errors") {
    CHECK_THROWS_AS(parse(""), EmptyInputError);
    CHECK_THROWS_AS(parse("Date,Open,High,Low,Close,Volume\n"), SchemaError);
    try {
        parse(kHeader + "2023-03-01,1,1,1,1,1,1\n2023-13-01,1,1,1,1,1,1\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
    CHECK_THROWS_AS(parse(kHeader + "2023-03-01,1,1,1,1,1\n"), ParseError);
    CHECK_THROWS_AS(parse(kHeader + "2023-03-01,1,1,1,1,1,1\n2023-03-01,1,1,1,1,1,1\n"), ParseError);
    // high below low
    CHECK_THROWS_AS(parse(kHeader + "2023-03-01,1,1,2,1,1,1\n"), ParseError);
    CHECK_THROWS_AS(load_ohlcv_csv("/nonexistent/prices.csv", "X"), Error);
}

TEST_CASE("header with a byte order mark is accepted") {
    const auto s = parse("\xEF\xBB\xBF" + kHeader + "2023-03-01,1,1,1,1,1,1\n");
    CHECK(s.size() == 1);
}

TEST_CASE("drop_missing") {
    const auto full = series_from_closes({1, 2, 3, 4, 5});
    CHECK(drop_missing(full).bars == full.bars);

    auto partial = full;
    partial.bars[1].missing = true;
    partial.bars[1].close = std::nan("");
    partial.bars[3].missing = true;
    const auto kept = drop_missing(partial);
    REQUIRE(kept.size() == 3);
    CHECK(kept.bars[0].close == 1.0);
    CHECK(kept.bars[1].close == 3.0);
    CHECK(kept.bars[2].close == 5.0);
    CHECK(drop_missing(kept).bars == kept.bars);

    auto none = full;
    for (auto& b : none.bars) b.missing = true;
    CHECK_THROWS_AS(drop_missing(none), EmptyInputError);
}

TEST_CASE("treat_outliers on a constant series is a no-op") {
    const auto s = series_from_closes(std::vector<double>(20, 42.0));
    CHECK(treat_outliers(s, 3.0, OutlierMode::Remove).bars == s.bars);
    CHECK(treat_outliers(s, 3.0, OutlierMode::Cap).bars == s.bars);
}

TEST_CASE("treat_outliers removes or caps a +10 sigma point") {
    Rng rng(2024);
    std::vector<double> closes;
    for (int i = 0; i < 100; ++i) closes.push_back(100.0 + rng.normal());
    closes.insert(closes.begin() + 50, 110.0);
    const auto s = series_from_closes(closes);

    // Brute-force z-scores
    const double n = static_cast<double>(closes.size());
    double mean = 0.0;
    for (double c : closes) mean += c;
    mean /= n;
    double ss = 0.0;
    for (double c : closes) ss += (c - mean) * (c - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    std::vector<std::size_t> flagged;
    for (std::size_t i = 0; i < closes.size(); ++i) {
        if (std::abs((closes[i] - mean) / sd) > 3.0) flagged.push_back(i);
    }
    REQUIRE(flagged == std::vector<std::size_t>{50});

    const auto removed = treat_outliers(s, 3.0, OutlierMode::Remove);
    REQUIRE(removed.size() == s.size() - 1);
    for (const auto& b : removed.bars) CHECK(b.date != s.bars[50].date);

    const auto capped = treat_outliers(s, 3.0, OutlierMode::Cap);
    REQUIRE(capped.size() == s.size());
    CHECK(capped.bars[50].close == doctest::Approx(mean + 3.0 * sd).epsilon(1e-12));
    CHECK(capped.bars[50].open == s.bars[50].open);
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i != 50) CHECK(capped.bars[i] == s.bars[i]);
    }
}

TEST_CASE("treat_outliers length properties and errors") {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> closes;
        for (int i = 0; i < 30; ++i) closes.push_back(50.0 + 5.0 * rng.normal() * (i % 7 == 0 ? 4.0 : 1.0));
        for (double& c : closes) c = std::max(c, 1.0);
        const auto s = series_from_closes(closes);
        CHECK(treat_outliers(s, 2.0, OutlierMode::Cap).size() == s.size());
        CHECK(treat_outliers(s, 2.0, OutlierMode::Remove).size() <= s.size());
    }
    CHECK_THROWS_AS(treat_outliers(series_from_closes({1.0})), InsufficientDataError);
    CHECK_THROWS_AS(treat_outliers(series_from_closes({1.0, 2.0}), 0.0), DomainError);
}

TEST_CASE("parse, serialize, parse round-trips exactly") {
    const std::string text = kHeader +
                             "2023-03-01,10.123456789012345,11.5,9.75,10.1,10.05,1000000\n"
                             "2023-03-02,0.1,0.30000000000000004,0.1,0.2,0.2,7\n"
                             "2023-03-03,1,1,1,,1,1\n";
    const auto first = parse(text);
    std::ostringstream out;
    write_ohlcv_csv(out, first);
    const auto second = parse(out.str());
    REQUIRE(second.size() == first.size());
    for (std::size_t i = 0; i < first.size(); ++i) {
        const auto& a = first.bars[i];
        const auto& b = second.bars[i];
        CHECK(a.date == b.date);
        CHECK(a.missing == b.missing);
        CHECK(a.open == b.open);
        CHECK(a.high == b.high);
        CHECK(a.volume == b.volume);
        if (!a.missing) CHECK(a.close == b.close);
    }
    std::ostringstream again;
    write_ohlcv_csv(again, second);
    CHECK(again.str() == out.str());
}

TEST_CASE("price column names") {
    CHECK(parse_price_column("close") == PriceColumn::Close);
    CHECK(parse_price_column("adj_close") == PriceColumn::AdjClose);
    CHECK(std::string(price_column_name(PriceColumn::AdjClose)) == "adj_close");
    CHECK_THROWS_AS(parse_price_column("open"), ConfigError);
}
