#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "stockcast/features.hpp"
#include "stockcast/neural.hpp"
#include "stockcast/training.hpp"

namespace stockcast {

struct MetricsReport {
    double mae = 0.0;
    double mse = 0.0;
    double rmse = 0.0;
    std::optional<double> mape; // percent
    std::size_t n = 0;
};

struct RiskReturnPoint {
    std::string ticker;
    double mu = 0.0;    // mean daily return, percent
    double sigma = 0.0; // sample standard deviation, percent
};

// Pearson coefficients; entries for constant series are nullopt.
struct CorrelationMatrix {
    std::vector<std::string> tickers;
    std::vector<std::optional<double>> values; // row-major, n x n

    std::optional<double> at(std::size_t i, std::size_t j) const { return values[i * tickers.size() + j]; }
};

struct NamedSeries {
    std::string name;
    std::vector<double> values;
};

struct PredictionSeries {
    std::vector<Date> dates;
    std::vector<double> actual;
    std::vector<double> forecast;
    std::vector<std::string> warnings;
};

struct HistogramBin {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t count = 0;
};

// Normalized-space forecaster: one prediction per dataset sample.
using Forecaster = std::function<std::vector<double>(const WindowedDataset&)>;

Forecaster network_forecaster(const LstmNetwork& network);
// Returns each sample's own normalized target; a round-trip stub.
Forecaster identity_forecaster();

// MAE, MSE, RMSE and, when requested, MAPE = 100 * mean |a - f| / |a|.
MetricsReport compute_metrics(std::span<const double> actual, std::span<const double> forecast, bool with_mape = true);

// Inverse-transforms forecasts and targets with `target_scaler` and pairs them
// with the target dates. Inputs outside [-0.5, 1.5] add a warning.
PredictionSeries predict_series(const Forecaster& forecaster, const ScalerParams& target_scaler,
                                const WindowedDataset& dataset);
PredictionSeries predict_series(const LstmNetwork& network, const ScalerParams& target_scaler,
                                const WindowedDataset& dataset);

std::optional<double> pearson(std::span<const double> x, std::span<const double> y);
CorrelationMatrix pearson_matrix(std::span<const NamedSeries> series);

std::vector<RiskReturnPoint> risk_return(std::span<const NamedSeries> returns);

std::vector<HistogramBin> histogram(std::span<const double> values, std::size_t bins);

void write_metrics_table(std::ostream& out, const MetricsReport& report);
void write_metrics_json(std::ostream& out, const MetricsReport& report);
void write_predictions_csv(std::ostream& out, const PredictionSeries& series);
void write_correlation_csv(std::ostream& out, const CorrelationMatrix& matrix);

// ---- window-size / sentiment sensitivity harness ----

struct SensitivityCell {
    std::size_t window = 0;
    bool with_sentiment = false;
    std::optional<double> mape;
    std::optional<double> mse; // normalized-space test MSE
    std::string note;
};

struct SensitivityOptions {
    std::vector<std::size_t> windows{30, 60, 90};
    bool ablation = true;          // run both with and without the sentiment column
    bool with_sentiment = true;    // used when ablation is off
    std::string target_column = "close";
    std::string sentiment_column = "sentiment";
    std::vector<std::string> extra_features;
    double split_ratio = 0.8;
    bool paper_faithful = false;
    NetworkConfig network;         // window_size and n_features are overridden per cell
    TrainConfig train;
};

// Trains one model per (window, sentiment) cell from the same base seeds and
// reports its test MAPE. Cells that cannot be built are reported with a note.
std::vector<SensitivityCell> window_sensitivity(const FeatureFrame& frame, const SensitivityOptions& options);

void write_sensitivity_csv(std::ostream& out, std::span<const SensitivityCell> cells);

} // namespace stockcast
