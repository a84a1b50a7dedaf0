#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "stockcast/features.hpp"

namespace stockcast {

struct DataOptions {
    std::size_t window_size = 60;
    std::string target_column = "close";
    // Model inputs in column order; must contain the target column.
    std::vector<std::string> feature_columns{"close", "sentiment"};
    double split_ratio = 0.8;
    // Fit scalers on the whole series instead of the training rows only.
    bool paper_faithful = false;
};

struct PreparedData {
    FeatureFrame frame; // selected feature columns, undefined rows dropped, raw units
    std::vector<NamedScaler> scalers;
    WindowedDataset train;
    WindowedDataset test;
};

// Rows [0, n) whose values feed training samples (inputs and targets) after a
// chronological split of the windows at `split_ratio`.
std::size_t training_row_count(std::size_t rows, std::size_t window_size, double split_ratio);

// Select -> drop undefined rows -> fit scalers -> scale -> window -> split.
PreparedData prepare_data(const FeatureFrame& frame, const DataOptions& options);

// Same pipeline with already fitted scalers (e.g. restored from a checkpoint).
PreparedData prepare_data(const FeatureFrame& frame, const DataOptions& options,
                          const std::vector<NamedScaler>& scalers);

} // namespace stockcast
