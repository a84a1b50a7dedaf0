#include "stockcast/dataset.hpp"

#include <algorithm>
#include <cmath>

#include "stockcast/errors.hpp"
#include "stockcast/training.hpp"

namespace stockcast {

namespace {

FeatureFrame select_defined(const FeatureFrame& frame, const DataOptions& options) {
    if (std::find(options.feature_columns.begin(), options.feature_columns.end(), options.target_column) ==
        options.feature_columns.end()) {
        throw ConfigError("target column '" + options.target_column + "' is not among the model features");
    }
    return drop_undefined_rows(select_columns(frame, options.feature_columns));
}

PreparedData window_and_split(FeatureFrame selected, std::vector<NamedScaler> scalers, const DataOptions& options) {
    PreparedData out;
    const auto windows = make_windows(scale_frame(selected, scalers), options.window_size, options.target_column);
    auto [train, test] = split_train_test(windows, options.split_ratio);
    out.frame = std::move(selected);
    out.scalers = std::move(scalers);
    out.train = std::move(train);
    out.test = std::move(test);
    return out;
}

} // namespace

std::size_t training_row_count(std::size_t rows, std::size_t window_size, double split_ratio) {
    if (!(split_ratio > 0.0 && split_ratio < 1.0)) throw ConfigError("split ratio must lie in (0, 1)");
    if (rows <= window_size) {
        throw InsufficientDataError("window of " + std::to_string(window_size) + " needs more than " +
                                    std::to_string(window_size) + " usable rows, have " +
                                    std::to_string(rows));
    }
    const auto samples = rows - window_size;
    const auto n_train = static_cast<std::size_t>(std::floor(static_cast<double>(samples) * split_ratio));
    return std::max<std::size_t>(n_train, 1) + window_size;
}

PreparedData prepare_data(const FeatureFrame& frame, const DataOptions& options) {
    FeatureFrame selected = select_defined(frame, options);
    const std::size_t fit_rows = options.paper_faithful
                                     ? selected.rows()
                                     : training_row_count(selected.rows(), options.window_size, options.split_ratio);
    auto scalers = fit_frame_scalers(selected, fit_rows);
    return window_and_split(std::move(selected), std::move(scalers), options);
}

PreparedData prepare_data(const FeatureFrame& frame, const DataOptions& options,
                          const std::vector<NamedScaler>& scalers) {
    FeatureFrame selected = select_defined(frame, options);
    std::vector<NamedScaler> used;
    for (const auto& name : options.feature_columns) used.push_back({name, scaler_for(scalers, name)});
    return window_and_split(std::move(selected), std::move(used), options);
}

} // namespace stockcast
