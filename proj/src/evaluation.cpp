#include "stockcast/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "stockcast/dataset.hpp"
#include "stockcast/errors.hpp"
#include "stockcast/text.hpp"

namespace stockcast {

namespace {

double mean_of(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

} // namespace

Forecaster network_forecaster(const LstmNetwork& network) {
    return [&network](const WindowedDataset& ds) {
        std::vector<double> out;
        out.reserve(ds.size());
        for (const auto& window : ds.X) out.push_back(predict(network, window));
        return out;
    };
}

Forecaster identity_forecaster() {
    return [](const WindowedDataset& ds) { return ds.y; };
}

MetricsReport compute_metrics(std::span<const double> actual, std::span<const double> forecast, bool with_mape) {
    if (actual.size() != forecast.size()) {
        throw ContractError("actual and forecast lengths differ (" + std::to_string(actual.size()) + " vs " +
                            std::to_string(forecast.size()) + ")");
    }
    if (actual.empty()) throw ContractError("metrics need at least one observation");
    MetricsReport r;
    r.n = actual.size();
    double abs_sum = 0.0, sq_sum = 0.0, pct_sum = 0.0;
    for (std::size_t i = 0; i < r.n; ++i) {
        const double err = actual[i] - forecast[i];
        abs_sum += std::abs(err);
        sq_sum += err * err;
        if (with_mape) {
            if (actual[i] == 0.0) throw DomainError("MAPE is undefined when an actual value is 0");
            pct_sum += std::abs(err / actual[i]);
        }
    }
    const double n = static_cast<double>(r.n);
    r.mae = abs_sum / n;
    r.mse = sq_sum / n;
    r.rmse = std::sqrt(r.mse);
    if (with_mape) r.mape = 100.0 * pct_sum / n;
    return r;
}

PredictionSeries predict_series(const Forecaster& forecaster, const ScalerParams& target_scaler,
                                const WindowedDataset& dataset) {
    PredictionSeries out;
    std::size_t out_of_range = 0;
    for (const auto& window : dataset.X) {
        for (double v : window.data()) {
            if (v < -0.5 || v > 1.5) ++out_of_range;
        }
    }
    if (out_of_range > 0) {
        out.warnings.push_back(std::to_string(out_of_range) +
                               " normalized inputs fall outside [-0.5, 1.5]; the scaler may not match this data");
    }
    const auto normalized = forecaster(dataset);
    if (normalized.size() != dataset.size()) throw ContractError("forecaster returned the wrong number of predictions");
    out.dates = dataset.target_dates;
    out.actual = inverse_transform(dataset.y, target_scaler);
    out.forecast = inverse_transform(normalized, target_scaler);
    return out;
}

PredictionSeries predict_series(const LstmNetwork& network, const ScalerParams& target_scaler,
                                const WindowedDataset& dataset) {
    return predict_series(network_forecaster(network), target_scaler, dataset);
}

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ContractError("correlated series must have equal lengths");
    if (x.size() < 2) throw InsufficientDataError("correlation needs at least 2 observations");
    const double mx = mean_of(x);
    const double my = mean_of(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return std::nullopt;
    // The (n - 1) factors of sample covariance and deviations cancel.
    const double rho = sxy / std::sqrt(sxx * syy);
    return std::clamp(rho, -1.0, 1.0);
}

CorrelationMatrix pearson_matrix(std::span<const NamedSeries> series) {
    CorrelationMatrix m;
    const std::size_t n = series.size();
    for (const auto& s : series) m.tickers.push_back(s.name);
    m.values.resize(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            auto rho = pearson(series[i].values, series[j].values);
            if (i == j && rho) rho = 1.0;
            m.values[i * n + j] = rho;
            m.values[j * n + i] = rho;
        }
    }
    return m;
}

std::vector<RiskReturnPoint> risk_return(std::span<const NamedSeries> returns) {
    std::vector<RiskReturnPoint> out;
    for (const auto& s : returns) {
        if (s.values.size() < 2) {
            throw InsufficientDataError("risk/return for " + s.name + " needs at least 2 returns");
        }
        const double mu = mean_of(s.values);
        double ss = 0.0;
        for (double r : s.values) ss += (r - mu) * (r - mu);
        out.push_back({s.name, mu, std::sqrt(ss / static_cast<double>(s.values.size() - 1))});
    }
    return out;
}

std::vector<HistogramBin> histogram(std::span<const double> values, std::size_t bins) {
    if (bins == 0) throw ConfigError("histogram needs at least one bin");
    if (values.empty()) return {};
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    const double width = hi > lo ? (hi - lo) / static_cast<double>(bins) : 1.0;
    std::vector<HistogramBin> out(bins);
    for (std::size_t b = 0; b < bins; ++b) {
        out[b].lo = lo + width * static_cast<double>(b);
        out[b].hi = b + 1 == bins ? std::max(hi, lo + width) : lo + width * static_cast<double>(b + 1);
    }
    for (double v : values) {
        auto b = static_cast<std::size_t>((v - lo) / width);
        out[std::min(b, bins - 1)].count++;
    }
    return out;
}

void write_metrics_table(std::ostream& out, const MetricsReport& report) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(4);
    s << "metric  value\n";
    s << "MAE     " << report.mae << '\n';
    s << "MSE     " << report.mse << '\n';
    s << "RMSE    " << report.rmse << '\n';
    s << "MAPE    ";
    if (report.mape) {
        s << *report.mape << " %\n";
    } else {
        s << "n/a\n";
    }
    s << "n       " << report.n << '\n';
    out << s.str();
}

void write_metrics_json(std::ostream& out, const MetricsReport& report) {
    nlohmann::ordered_json j;
    j["mae"] = report.mae;
    j["mse"] = report.mse;
    j["rmse"] = report.rmse;
    j["mape_percent"] = report.mape ? nlohmann::ordered_json(*report.mape) : nlohmann::ordered_json(nullptr);
    j["n"] = report.n;
    out << j.dump(2) << '\n';
}

void write_predictions_csv(std::ostream& out, const PredictionSeries& series) {
    out << "date,actual,forecast\n";
    for (std::size_t i = 0; i < series.dates.size(); ++i) {
        out << format_date(series.dates[i]) << ',' << format_double(series.actual[i]) << ','
            << format_double(series.forecast[i]) << '\n';
    }
}

void write_correlation_csv(std::ostream& out, const CorrelationMatrix& matrix) {
    out << "ticker";
    for (const auto& t : matrix.tickers) out << ',' << t;
    out << '\n';
    for (std::size_t i = 0; i < matrix.tickers.size(); ++i) {
        out << matrix.tickers[i];
        for (std::size_t j = 0; j < matrix.tickers.size(); ++j) {
            out << ',';
            if (const auto v = matrix.at(i, j)) out << format_double(*v);
        }
        out << '\n';
    }
}

std::vector<SensitivityCell> window_sensitivity(const FeatureFrame& frame, const SensitivityOptions& options) {
    std::vector<bool> variants;
    if (options.ablation) {
        variants = {false, true};
    } else {
        variants = {options.with_sentiment};
    }

    std::vector<SensitivityCell> cells;
    for (std::size_t window : options.windows) {
        for (bool sentiment : variants) {
            SensitivityCell cell;
            cell.window = window;
            cell.with_sentiment = sentiment;
            try {
                DataOptions data;
                data.window_size = window;
                data.target_column = options.target_column;
                data.split_ratio = options.split_ratio;
                data.paper_faithful = options.paper_faithful;
                data.feature_columns = {options.target_column};
                if (sentiment) data.feature_columns.push_back(options.sentiment_column);
                for (const auto& extra : options.extra_features) data.feature_columns.push_back(extra);
                const auto prepared = prepare_data(frame, data);

                NetworkConfig net_cfg = options.network;
                net_cfg.window_size = window;
                net_cfg.n_features = data.feature_columns.size();
                auto trained = train(init_params(net_cfg), prepared.train, options.train);

                const auto& target_scaler = scaler_for(prepared.scalers, options.target_column);
                const auto series = predict_series(trained.network, target_scaler, prepared.test);
                cell.mape = compute_metrics(series.actual, series.forecast).mape;
                cell.mse = evaluate_loss(trained.network, prepared.test);
            } catch (const Error& e) {
                cell.note = e.what();
            }
            cells.push_back(std::move(cell));
        }
    }
    return cells;
}

void write_sensitivity_csv(std::ostream& out, std::span<const SensitivityCell> cells) {
    out << "window,sentiment,mape,test_mse,note\n";
    for (const auto& c : cells) {
        out << c.window << ',' << (c.with_sentiment ? "on" : "off") << ',';
        if (c.mape) out << format_double(*c.mape);
        out << ',';
        if (c.mse) out << format_double(*c.mse);
        std::string note = c.note;
        std::replace(note.begin(), note.end(), ',', ';');
        out << ',' << note << '\n';
    }
}

} // namespace stockcast
