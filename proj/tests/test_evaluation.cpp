#include <cmath>
#include <sstream>

#include "doctest.h"
#include "stockcast/dataset.hpp"
#include "stockcast/errors.hpp"
#include "stockcast/evaluation.hpp"
#include "stockcast/rng.hpp"
#include "stockcast/synthetic.hpp"

using namespace stockcast;

namespace {

double oracle_pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return (sxy / (n - 1)) / (std::sqrt(sxx / (n - 1)) * std::sqrt(syy / (n - 1)));
}

PreparedData sine_prepared(std::size_t length, std::size_t window) {
    DataOptions opts;
    opts.window_size = window;
    opts.feature_columns = {"close"};
    return prepare_data(sine_series(length).frame, opts);
}

} // namespace

TEST_CASE("compute_metrics examples") {
    const std::vector<double> a{100, 200};
    const auto same = compute_metrics(a, a);
    CHECK(same.mae == 0.0);
    CHECK(same.mse == 0.0);
    CHECK(same.rmse == 0.0);
    CHECK(*same.mape == 0.0);

    const auto m = compute_metrics(a, std::vector<double>{99, 202});
    CHECK(m.mae == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(m.mse == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(m.rmse == doctest::Approx(1.5811).epsilon(1e-4));
    CHECK(*m.mape == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(m.n == 2);

    CHECK_THROWS_AS(compute_metrics(a, std::vector<double>{1.0}), ContractError);
    CHECK_THROWS_AS(compute_metrics(std::vector<double>{}, std::vector<double>{}), ContractError);
    CHECK_THROWS_AS(compute_metrics(std::vector<double>{0.0, 1.0}, std::vector<double>{1.0, 1.0}), DomainError);
    CHECK_FALSE(compute_metrics(std::vector<double>{0.0}, std::vector<double>{1.0}, false).mape.has_value());
}

TEST_CASE("published error table is internally consistent") {
    struct Row {
        double mse, rmse;
    };
    for (const Row r : {Row{58.03, 7.62}, Row{52.14, 7.22}, Row{60.27, 7.76}, Row{65.43, 8.09}}) {
        CHECK(std::abs(std::sqrt(r.mse) - r.rmse) < 0.01);
    }
}

TEST_CASE("metrics invariants on random data") {
    Rng rng(12);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> a(37), f(37);
        for (std::size_t i = 0; i < a.size(); ++i) {
            a[i] = rng.uniform(10.0, 500.0);
            f[i] = a[i] + rng.normal() * 5.0;
        }
        const auto m = compute_metrics(a, f);
        CHECK(std::abs(m.rmse * m.rmse - m.mse) <= 1e-12 * m.mse);
        CHECK(m.mae <= m.rmse);
        CHECK(m.mae >= 0.0);
        CHECK(*m.mape >= 0.0);
    }
}

TEST_CASE("pearson examples") {
    const std::vector<double> x{1.0, 2.5, 2.0, 4.0, 7.0};
    const std::vector<double> y{0.5, 0.7, 2.0, 1.0, 3.5};
    CHECK(*pearson(x, x) == doctest::Approx(1.0).epsilon(1e-14));
    std::vector<double> neg;
    for (double v : x) neg.push_back(-v);
    CHECK(*pearson(x, neg) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(std::abs(*pearson(x, y) - oracle_pearson(x, y)) < 1e-12);

    CHECK_FALSE(pearson(x, std::vector<double>(5, 3.0)).has_value());
    CHECK_THROWS_AS(pearson(x, std::vector<double>{1, 2}), ContractError);
    CHECK_THROWS_AS(pearson(std::vector<double>{1}, std::vector<double>{2}), InsufficientDataError);
}

TEST_CASE("pearson_matrix properties") {
    Rng rng(31);
    std::vector<NamedSeries> s(4);
    for (std::size_t k = 0; k < s.size(); ++k) {
        s[k].name = "T" + std::to_string(k);
        for (int i = 0; i < 60; ++i) s[k].values.push_back(rng.normal());
    }
    for (int i = 0; i < 60; ++i) s[1].values[i] += s[0].values[i];
    const auto m = pearson_matrix(s);
    CHECK(m.tickers == std::vector<std::string>{"T0", "T1", "T2", "T3"});
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(*m.at(i, i) == 1.0);
        for (std::size_t j = 0; j < 4; ++j) {
            CHECK(std::abs(*m.at(i, j) - *m.at(j, i)) <= 1e-12);
            CHECK(*m.at(i, j) >= -1.0);
            CHECK(*m.at(i, j) <= 1.0);
        }
    }
    auto affine = s;
    for (double& v : affine[2].values) v = 3.7 * v - 12.0;
    const auto m2 = pearson_matrix(affine);
    for (std::size_t i = 0; i < 16; ++i) CHECK(std::abs(*m.values[i] - *m2.values[i]) <= 1e-12);

    s.push_back({"FLAT", std::vector<double>(60, 1.0)});
    const auto m3 = pearson_matrix(s);
    CHECK_FALSE(m3.at(4, 0).has_value());
    CHECK_FALSE(m3.at(4, 4).has_value());

    std::ostringstream out;
    write_correlation_csv(out, m3);
    CHECK(out.str().rfind("ticker,T0,T1,T2,T3,FLAT\nT0,1,", 0) == 0);
    CHECK(out.str().find("FLAT,,,,,\n") != std::string::npos);
}

TEST_CASE("risk_return examples") {
    const std::vector<NamedSeries> r{{"A", {1.0, -1.0}}, {"C", {0.3, 0.3, 0.3}}};
    const auto pts = risk_return(r);
    CHECK(pts[0].ticker == "A");
    CHECK(pts[0].mu == 0.0);
    CHECK(pts[0].sigma == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(pts[1].mu == doctest::Approx(0.3));
    CHECK(pts[1].sigma == doctest::Approx(0.0));

    Rng rng(77);
    NamedSeries draws{"N", {}};
    const double mu = 0.05, sigma = 1.7;
    for (int i = 0; i < 1000; ++i) draws.values.push_back(mu + sigma * rng.normal());
    const auto p = risk_return(std::vector<NamedSeries>{draws})[0];
    CHECK(std::abs(p.mu - mu) < 3.0 * sigma / std::sqrt(1000.0));
    CHECK(std::abs(p.sigma - sigma) < 3.0 * sigma / std::sqrt(2.0 * 999.0));

    CHECK_THROWS_AS(risk_return(std::vector<NamedSeries>{{"X", {1.0}}}), InsufficientDataError);
}

TEST_CASE("histogram bins cover every value") {
    const std::vector<double> v{-1.0, 0.0, 0.5, 1.0, 1.0, 3.0};
    const auto h = histogram(v, 4);
    REQUIRE(h.size() == 4);
    CHECK(h.front().lo == -1.0);
    CHECK(h.back().hi == 3.0);
    std::size_t total = 0;
    for (const auto& b : h) total += b.count;
    CHECK(total == v.size());
    CHECK(h[3].count == 1);
}

TEST_CASE("predict_series with the identity stub is exact") {
    const auto p = sine_prepared(120, 10);
    const auto& scaler = scaler_for(p.scalers, "close");
    const auto series = predict_series(identity_forecaster(), scaler, p.test);
    CHECK(series.actual == series.forecast);
    CHECK(series.dates == p.test.target_dates);
    const auto m = compute_metrics(series.actual, series.forecast);
    CHECK(m.mae == 0.0);
    CHECK(m.mse == 0.0);
    CHECK(*m.mape == 0.0);
    CHECK(series.warnings.empty());
}

TEST_CASE("predict_series with the zero network forecasts the scaler minimum") {
    const auto p = sine_prepared(120, 10);
    const auto& scaler = scaler_for(p.scalers, "close");
    NetworkConfig cfg;
    cfg.window_size = 10;
    cfg.n_features = 1;
    cfg.layer_sizes = {4, 3};
    const auto series = predict_series(zero_network(cfg), scaler, p.test);
    for (double f : series.forecast) CHECK(f == scaler.x_min);

    std::ostringstream out;
    write_predictions_csv(out, series);
    CHECK(out.str().rfind("date,actual,forecast\n", 0) == 0);
}

TEST_CASE("predict_series warns about out-of-range inputs") {
    const auto p = sine_prepared(120, 10);
    const ScalerParams wrong{0.0, 1.0};
    auto test = p.test;
    test.X[0](0, 0) = 3.0;
    const auto series = predict_series(identity_forecaster(), wrong, test);
    CHECK_FALSE(series.warnings.empty());
}

TEST_CASE("metrics writers") {
    const auto m = compute_metrics(std::vector<double>{100, 200}, std::vector<double>{99, 202});
    std::ostringstream json;
    write_metrics_json(json, m);
    CHECK(json.str().find("\"mape_percent\"") != std::string::npos);
    std::ostringstream table;
    write_metrics_table(table, m);
    CHECK(table.str().find("MAPE") != std::string::npos);
}

TEST_CASE("window_sensitivity table cardinality") {
    const auto data = sentiment_coupled_series(90, 3);
    SensitivityOptions opts;
    opts.windows = {5};
    opts.network.layer_sizes = {4, 3};
    opts.train.epochs = 2;
    const auto cells = window_sensitivity(data.frame, opts);
    REQUIRE(cells.size() == 2);
    CHECK(cells[0].with_sentiment != cells[1].with_sentiment);
    for (const auto& c : cells) {
        CHECK(c.window == 5);
        REQUIRE(c.mape.has_value());
        CHECK(std::isfinite(*c.mape));
    }

    opts.windows = {5, 200};
    opts.ablation = false;
    const auto partial = window_sensitivity(data.frame, opts);
    REQUIRE(partial.size() == 2);
    CHECK(partial[0].mape.has_value());
    CHECK_FALSE(partial[1].mape.has_value());
    CHECK_FALSE(partial[1].note.empty());

    std::ostringstream out;
    write_sensitivity_csv(out, partial);
    CHECK(out.str().rfind("window,sentiment,mape,test_mse,note\n", 0) == 0);
}
