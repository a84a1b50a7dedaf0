#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

#include "stockcast/features.hpp"
#include "stockcast/neural.hpp"

namespace stockcast {

struct TrainConfig {
    std::size_t epochs = 100;
    std::size_t batch_size = 32;
    double learning_rate = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::size_t patience = 10;
    double validation_fraction = 0.1;
    // A validation loss counts as an improvement only if it beats the best by this much.
    double min_improvement = 1e-12;
    std::uint64_t seed = 42;

    void validate() const;
};

struct AdamState {
    std::vector<std::vector<double>> m;
    std::vector<std::vector<double>> v;
    std::uint64_t t = 0;

    static AdamState for_network(const LstmNetwork& network);
    friend bool operator==(const AdamState&, const AdamState&) = default;
};

struct EpochRecord {
    std::size_t epoch = 0; // 1-based
    double train_loss = 0.0;
    double val_loss = 0.0;
};

struct TrainHistory {
    std::vector<EpochRecord> epochs;
    std::size_t stopped_epoch = 0;
    std::size_t best_epoch = 0;
    double best_val_loss = std::numeric_limits<double>::infinity();
};

struct TrainResult {
    LstmNetwork network;
    AdamState optimizer;
    TrainHistory history;
};

struct LossValue {
    double loss = 0.0;
    double grad = 0.0;
};

// Chronological split: the first floor(n * ratio) samples train, the rest test.
std::pair<WindowedDataset, WindowedDataset> split_train_test(const WindowedDataset& dataset, double ratio);

LossValue mse_loss(double prediction, double target);

// One bias-corrected Adam update; increments state.t first.
void adam_step(std::span<const std::span<double>> params, std::span<const std::span<double>> grads,
               AdamState& state, const TrainConfig& config);

// Patience-based stopping rule on a sequence of validation losses.
class EarlyStopping {
public:
    EarlyStopping(std::size_t patience, double min_improvement) : patience_(patience), min_improvement_(min_improvement) {}

    // Feeds the loss of `epoch`; returns true once training should stop.
    bool update(std::size_t epoch, double loss);

    bool improved() const noexcept { return improved_; }
    std::size_t best_epoch() const noexcept { return best_epoch_; }
    double best_loss() const noexcept { return best_loss_; }

private:
    std::size_t patience_;
    double min_improvement_;
    std::size_t best_epoch_ = 0;
    double best_loss_ = std::numeric_limits<double>::infinity();
    std::size_t stale_ = 0;
    bool improved_ = false;
};

// Mean squared error of infer-mode predictions over a dataset.
double evaluate_loss(const LstmNetwork& network, const WindowedDataset& dataset);

// Trains on `train_split`, carving its last validation_fraction (floored) as
// the validation slice. Mini-batches run in chronological order and the short
// final batch is kept. Returns the parameters of the best validation epoch.
TrainResult train(LstmNetwork network, const WindowedDataset& train_split, const TrainConfig& config);

void write_history_csv(std::ostream& out, const TrainHistory& history);

// Guarded relative error |a - n| / max(|a|, |n|, kGradCheckFloor); entries
// where both sides are below kGradNegligible count as agreeing (a zero-loss
// sample has analytic gradient 0 and an O(eps^2) numeric one).
inline constexpr double kGradCheckFloor = 1e-8;
inline constexpr double kGradNegligible = 1e-9;
double gradient_relative_error(double analytic, double numeric);

// Max gradient_relative_error between `analytic` and central finite
// differences of the infer-mode squared error on one sample. The finite
// differences run through a separate extended-precision forward pass, so
// roundoff in the loss difference stays far below the tolerance.
double grad_check(const LstmNetwork& network, const Matrix& window, double target, double epsilon,
                  const Gradients& analytic);
double grad_check(const LstmNetwork& network, const Matrix& window, double target, double epsilon);

} // namespace stockcast
