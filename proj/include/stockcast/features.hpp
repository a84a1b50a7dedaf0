#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "stockcast/date.hpp"
#include "stockcast/matrix.hpp"

namespace stockcast {

// Min-Max parameters for one feature column.
struct ScalerParams {
    double x_min = 0.0;
    double x_max = 0.0;

    bool degenerate() const noexcept { return x_max == x_min; }
    friend bool operator==(const ScalerParams&, const ScalerParams&) = default;
};

struct NamedScaler {
    std::string column;
    ScalerParams params;
    friend bool operator==(const NamedScaler&, const NamedScaler&) = default;
};

// Dated table of named feature columns. Undefined cells (moving-average
// warm-up) hold NaN.
struct FeatureFrame {
    std::vector<Date> dates;
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;

    std::size_t rows() const noexcept { return dates.size(); }
    bool has_column(const std::string& name) const;
    const std::vector<double>& column(const std::string& name) const;
    void add_column(const std::string& name, std::vector<double> values);
};

// Sliding-window samples; sample i covers frame rows [i, i + window_size) and
// its target is the target column at row i + window_size.
struct WindowedDataset {
    std::size_t window_size = 0;
    std::vector<std::string> feature_names;
    std::vector<Matrix> X; // each window_size x n_features
    std::vector<double> y;
    std::vector<Date> target_dates;

    std::size_t size() const noexcept { return y.size(); }
    std::size_t n_features() const noexcept { return feature_names.size(); }
    WindowedDataset slice(std::size_t begin, std::size_t end) const;
};

// Percent returns: R_t = (P_t / P_{t-1} - 1) * 100.
std::vector<double> daily_returns(std::span<const double> prices);

// Trailing simple moving average; indices before k - 1 are nullopt.
std::vector<std::optional<double>> moving_average(std::span<const double> prices, std::size_t k);

ScalerParams fit_minmax(std::span<const double> values);
double transform(double value, const ScalerParams& params);
double inverse_transform(double value, const ScalerParams& params);
std::vector<double> transform(std::span<const double> values, const ScalerParams& params);
std::vector<double> inverse_transform(std::span<const double> values, const ScalerParams& params);

FeatureFrame select_columns(const FeatureFrame& frame, const std::vector<std::string>& names);
FeatureFrame drop_undefined_rows(const FeatureFrame& frame);
FeatureFrame slice_rows(const FeatureFrame& frame, std::size_t begin, std::size_t end);

// Independent scaler per column, fitted over rows [0, fit_rows).
std::vector<NamedScaler> fit_frame_scalers(const FeatureFrame& frame, std::size_t fit_rows);
FeatureFrame scale_frame(const FeatureFrame& frame, const std::vector<NamedScaler>& scalers);
const ScalerParams& scaler_for(const std::vector<NamedScaler>& scalers, const std::string& column);

WindowedDataset make_windows(const FeatureFrame& frame, std::size_t window_size,
                             const std::string& target_column);

void write_frame_csv(std::ostream& out, const FeatureFrame& frame);
FeatureFrame read_frame_csv(std::istream& in);
FeatureFrame load_frame_csv(const std::string& path);

void write_scalers_csv(std::ostream& out, const std::vector<NamedScaler>& scalers);
std::vector<NamedScaler> read_scalers_csv(std::istream& in);

} // namespace stockcast
