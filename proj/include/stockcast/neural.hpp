#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stockcast/matrix.hpp"
#include "stockcast/rng.hpp"

namespace stockcast {

enum class HeadActivation { Linear, Sigmoid };
enum class Mode { Train, Infer };

struct NetworkConfig {
    std::size_t window_size = 60;
    std::size_t n_features = 2;
    std::vector<std::size_t> layer_sizes{64, 32};
    double dropout_rate = 0.2;
    std::uint64_t seed = 42;
    HeadActivation head = HeadActivation::Linear;

    void validate() const;
    friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

// Gate blocks are stacked in this order inside every weight matrix and bias.
enum Gate : std::size_t { kInputGate = 0, kForgetGate = 1, kCandidateGate = 2, kOutputGate = 3 };
inline constexpr std::size_t kGateCount = 4;

// One LSTM layer. w_x is (4H x input_size), w_h is (4H x H), bias is 4H, all
// row-major with gate blocks of H rows stacked per Gate.
struct LstmParams {
    std::size_t input_size = 0;
    std::size_t hidden_size = 0;
    std::vector<double> w_x;
    std::vector<double> w_h;
    std::vector<double> bias;

    static LstmParams zeros(std::size_t input_size, std::size_t hidden_size);

    std::span<double> input_weights(Gate g) { return {w_x.data() + g * hidden_size * input_size, hidden_size * input_size}; }
    std::span<double> recurrent_weights(Gate g) { return {w_h.data() + g * hidden_size * hidden_size, hidden_size * hidden_size}; }
    std::span<double> gate_bias(Gate g) { return {bias.data() + g * hidden_size, hidden_size}; }
    std::span<const double> gate_bias(Gate g) const { return {bias.data() + g * hidden_size, hidden_size}; }

    friend bool operator==(const LstmParams&, const LstmParams&) = default;
};

struct LstmState {
    std::vector<double> h;
    std::vector<double> c;

    static LstmState zeros(std::size_t hidden_size) { return {std::vector<double>(hidden_size), std::vector<double>(hidden_size)}; }
};

struct DenseHead {
    std::vector<double> weights; // 1 x H
    double bias = 0.0;
    HeadActivation activation = HeadActivation::Linear;

    friend bool operator==(const DenseHead&, const DenseHead&) = default;
};

struct LstmNetwork {
    NetworkConfig config;
    std::vector<LstmParams> layers;
    DenseHead head;

    friend bool operator==(const LstmNetwork&, const LstmNetwork&) = default;
};

// Everything one cell step needs for its backward pass.
struct CellCache {
    std::vector<double> x;
    std::vector<double> h_prev;
    std::vector<double> c_prev;
    std::vector<double> gates; // post-activation, 4H, stacked per Gate
    std::vector<double> c;
    std::vector<double> tanh_c;
};

struct ForwardCache {
    std::vector<std::vector<CellCache>> steps;        // [layer][t]
    std::vector<std::vector<double>> dropout_masks;   // per layer boundary, T*H scale factors; empty in infer mode
    std::vector<double> final_hidden;
    double head_output = 0.0;
    std::size_t window_size = 0;
    std::vector<std::size_t> layer_sizes;
};

struct ForwardResult {
    double prediction = 0.0;
    ForwardCache cache;
};

// Same layout as the network parameters.
struct Gradients {
    std::vector<LstmParams> layers;
    std::vector<double> head_weights;
    double head_bias = 0.0;
};

// Glorot-uniform input and recurrent weights (per gate block), zero biases
// except the forget gate at 1.0, Glorot head weights. Deterministic in config.seed.
LstmNetwork init_params(const NetworkConfig& config);

// All-zero parameters with the configured shapes.
LstmNetwork zero_network(const NetworkConfig& config);

std::pair<LstmState, CellCache> lstm_cell_forward(std::span<const double> x, const LstmState& state,
                                                  const LstmParams& params);

// Window is (window_size x n_features). In train mode `rng` drives the
// inverted-dropout masks between stacked layers; it may be null in infer mode.
ForwardResult forward(const LstmNetwork& network, const Matrix& window, Mode mode, Rng* rng = nullptr);

// Infer-mode forward without building a cache.
double predict(const LstmNetwork& network, const Matrix& window);

Gradients zero_gradients(const LstmNetwork& network);

// Adds the gradient of a loss with dLoss/dZ = dz to `grads`.
void accumulate_backward(const LstmNetwork& network, const ForwardCache& cache, double dz, Gradients& grads);
Gradients backward(const LstmNetwork& network, const ForwardCache& cache, double dz);

// Flat views in a fixed order: per layer w_x, w_h, bias; then head weights, head bias.
std::vector<std::span<double>> parameter_tensors(LstmNetwork& network);
std::vector<std::span<const double>> parameter_tensors(const LstmNetwork& network);
std::vector<std::span<double>> gradient_tensors(Gradients& grads);
std::vector<std::string> parameter_names(const LstmNetwork& network);

double sigmoid(double x);

} // namespace stockcast
