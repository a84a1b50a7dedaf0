#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "stockcast/dataset.hpp"
#include "stockcast/evaluation.hpp"
#include "stockcast/market_data.hpp"
#include "stockcast/neural.hpp"
#include "stockcast/sentiment.hpp"
#include "stockcast/training.hpp"

namespace stockcast {

// Settings for every subcommand. Defaults follow the reference setup:
// window 60, LSTM 64/32, dropout 0.2, 100 epochs, batch 32, patience 10, 80/20 split.
struct RunConfig {
    std::vector<std::pair<std::string, std::string>> prices; // ticker -> OHLCV CSV
    std::vector<std::pair<std::string, std::string>> news;   // ticker -> news JSONL ("*" applies to all)
    std::string lexicon;                                      // empty: bundled lexicon
    std::string ticker;                                       // ticker to model; default first in `prices`
    std::string out_dir = "out";
    std::string frame;                                        // default <out>/<ticker>_frame.csv
    std::string checkpoint;                                   // default <out>/model.ckpt

    PriceColumn target = PriceColumn::Close;
    PriceColumn returns_column = PriceColumn::AdjClose;
    bool use_sentiment = true;
    std::vector<std::size_t> moving_averages{10, 20, 50};
    bool ma_as_inputs = false;
    double outlier_threshold = 3.0;
    OutlierMode outlier_mode = OutlierMode::Cap;

    double split_ratio = 0.8;
    bool paper_faithful = false;
    NetworkConfig network;
    TrainConfig train;

    std::vector<std::size_t> sensitivity_windows{30, 60, 90};
    bool ablation = true;
    std::size_t histogram_bins = 30;

    std::string synthetic_kind = "sine";
    std::size_t synthetic_length = 400;
    double synthetic_noise = 0.01;

    std::uint64_t seed = 42;

    // Propagates `seed` into the network and training configs.
    void set_seed(std::uint64_t value);
    std::string model_ticker() const;
    std::string frame_path() const;
    std::string checkpoint_path() const;
    std::string output_path(const std::string& name) const;
    std::string target_name() const { return price_column_name(target); }
    // Model inputs: target, sentiment when enabled and present, MA columns when requested.
    std::vector<std::string> feature_columns(const FeatureFrame& frame) const;
};

// JSON config; relative paths resolve against the config file's directory.
RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config(const std::string& json_text, const std::string& base_dir = {});

// Cleaned, feature-augmented frame for one price series.
FeatureFrame build_frame(const OhlcvSeries& cleaned, const RunConfig& config,
                         const std::vector<ScoredNews>* news);

struct TrainSummary {
    std::size_t best_epoch = 0;
    std::size_t stopped_epoch = 0;
    double best_val_loss = 0.0;
    double first_val_loss = 0.0;
};

struct EvaluateSummary {
    MetricsReport metrics;
    std::vector<std::string> warnings;
};

// Each command writes its artifacts under config.out_dir and reports progress on `log`.
std::vector<std::string> cmd_ingest(const RunConfig& config, std::ostream& log);
std::vector<std::string> cmd_analyze(const RunConfig& config, std::ostream& log);
TrainSummary cmd_train(const RunConfig& config, std::ostream& log);
EvaluateSummary cmd_evaluate(const RunConfig& config, std::ostream& log);
std::vector<SensitivityCell> cmd_sensitivity(const RunConfig& config, std::ostream& log);
std::vector<std::string> cmd_synthetic(const RunConfig& config, std::ostream& log);

} // namespace stockcast
