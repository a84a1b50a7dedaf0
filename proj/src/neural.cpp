#include "stockcast/neural.hpp"

#include <algorithm>
#include <cmath>

#include "stockcast/errors.hpp"

namespace stockcast {

namespace {

// a = W_x x + W_h h + b, then gate activations in place.
void gate_activations(const LstmParams& p, std::span<const double> x, std::span<const double> h,
                      std::vector<double>& gates) {
    const std::size_t H = p.hidden_size;
    const std::size_t I = p.input_size;
    gates.resize(kGateCount * H);
    for (std::size_t r = 0; r < kGateCount * H; ++r) {
        double acc = p.bias[r];
        const double* wx = p.w_x.data() + r * I;
        for (std::size_t k = 0; k < I; ++k) acc += wx[k] * x[k];
        const double* wh = p.w_h.data() + r * H;
        for (std::size_t k = 0; k < H; ++k) acc += wh[k] * h[k];
        gates[r] = acc;
    }
    for (std::size_t j = 0; j < H; ++j) {
        gates[kInputGate * H + j] = sigmoid(gates[kInputGate * H + j]);
        gates[kForgetGate * H + j] = sigmoid(gates[kForgetGate * H + j]);
        gates[kCandidateGate * H + j] = std::tanh(gates[kCandidateGate * H + j]);
        gates[kOutputGate * H + j] = sigmoid(gates[kOutputGate * H + j]);
    }
}

void check_finite(std::span<const double> x) {
    for (double v : x) {
        if (!std::isfinite(v)) throw NumericError("non-finite value in LSTM input");
    }
}

void glorot_fill(std::span<double> out, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (double& w : out) w = rng.uniform(-limit, limit);
}

void check_window(const LstmNetwork& network, const Matrix& window) {
    const auto& cfg = network.config;
    if (window.rows() != cfg.window_size || window.cols() != cfg.n_features) {
        throw ShapeError("window is " + std::to_string(window.rows()) + "x" + std::to_string(window.cols()) +
                         ", network expects " + std::to_string(cfg.window_size) + "x" +
                         std::to_string(cfg.n_features));
    }
}

double head_output(const DenseHead& head, std::span<const double> h) {
    double z = head.bias;
    for (std::size_t j = 0; j < h.size(); ++j) z += head.weights[j] * h[j];
    return head.activation == HeadActivation::Sigmoid ? sigmoid(z) : z;
}

} // namespace

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

void NetworkConfig::validate() const {
    if (window_size == 0) throw ConfigError("window_size must be positive");
    if (n_features == 0) throw ConfigError("n_features must be positive");
    if (layer_sizes.empty()) throw ConfigError("at least one LSTM layer is required");
    for (auto s : layer_sizes) {
        if (s == 0) throw ConfigError("LSTM layer sizes must be positive");
    }
    if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) throw ConfigError("dropout_rate must lie in [0, 1)");
}

LstmParams LstmParams::zeros(std::size_t input_size, std::size_t hidden_size) {
    LstmParams p;
    p.input_size = input_size;
    p.hidden_size = hidden_size;
    p.w_x.assign(kGateCount * hidden_size * input_size, 0.0);
    p.w_h.assign(kGateCount * hidden_size * hidden_size, 0.0);
    p.bias.assign(kGateCount * hidden_size, 0.0);
    return p;
}

LstmNetwork zero_network(const NetworkConfig& config) {
    config.validate();
    LstmNetwork net;
    net.config = config;
    std::size_t in = config.n_features;
    for (auto h : config.layer_sizes) {
        net.layers.push_back(LstmParams::zeros(in, h));
        in = h;
    }
    net.head.weights.assign(in, 0.0);
    net.head.activation = config.head;
    return net;
}

LstmNetwork init_params(const NetworkConfig& config) {
    LstmNetwork net = zero_network(config);
    Rng rng(config.seed);
    for (auto& layer : net.layers) {
        for (std::size_t g = 0; g < kGateCount; ++g) {
            glorot_fill(layer.input_weights(static_cast<Gate>(g)), layer.input_size, layer.hidden_size, rng);
        }
        for (std::size_t g = 0; g < kGateCount; ++g) {
            glorot_fill(layer.recurrent_weights(static_cast<Gate>(g)), layer.hidden_size, layer.hidden_size, rng);
        }
        auto forget = layer.gate_bias(kForgetGate);
        std::fill(forget.begin(), forget.end(), 1.0);
    }
    glorot_fill(net.head.weights, net.head.weights.size(), 1, rng);
    return net;
}

std::pair<LstmState, CellCache> lstm_cell_forward(std::span<const double> x, const LstmState& state,
                                                  const LstmParams& params) {
    const std::size_t H = params.hidden_size;
    if (x.size() != params.input_size || state.h.size() != H || state.c.size() != H) {
        throw ShapeError("LSTM cell input or state has the wrong size");
    }
    check_finite(x);

    CellCache cache;
    cache.x.assign(x.begin(), x.end());
    cache.h_prev = state.h;
    cache.c_prev = state.c;
    gate_activations(params, x, state.h, cache.gates);

    LstmState next{std::vector<double>(H), std::vector<double>(H)};
    cache.c.resize(H);
    cache.tanh_c.resize(H);
    for (std::size_t j = 0; j < H; ++j) {
        const double i = cache.gates[kInputGate * H + j];
        const double f = cache.gates[kForgetGate * H + j];
        const double g = cache.gates[kCandidateGate * H + j];
        const double o = cache.gates[kOutputGate * H + j];
        next.c[j] = f * state.c[j] + i * g;
        cache.c[j] = next.c[j];
        cache.tanh_c[j] = std::tanh(next.c[j]);
        next.h[j] = o * cache.tanh_c[j];
    }
    return {std::move(next), std::move(cache)};
}

ForwardResult forward(const LstmNetwork& network, const Matrix& window, Mode mode, Rng* rng) {
    check_window(network, window);
    const auto& cfg = network.config;
    const std::size_t T = cfg.window_size;
    const bool drop = mode == Mode::Train && cfg.dropout_rate > 0.0;
    if (drop && rng == nullptr) throw ContractError("train-mode forward with dropout needs an rng");

    ForwardResult result;
    auto& cache = result.cache;
    cache.window_size = T;
    cache.layer_sizes = cfg.layer_sizes;
    cache.steps.resize(network.layers.size());

    // Layer input sequence, T rows of the current width.
    std::vector<std::vector<double>> sequence(T);
    for (std::size_t t = 0; t < T; ++t) sequence[t].assign(window.row(t).begin(), window.row(t).end());

    for (std::size_t l = 0; l < network.layers.size(); ++l) {
        const auto& layer = network.layers[l];
        if (l > 0 && drop) {
            const double keep_scale = 1.0 / (1.0 - cfg.dropout_rate);
            std::vector<double> mask(T * layer.input_size);
            for (double& m : mask) m = rng->uniform() < cfg.dropout_rate ? 0.0 : keep_scale;
            for (std::size_t t = 0; t < T; ++t) {
                for (std::size_t k = 0; k < layer.input_size; ++k) sequence[t][k] *= mask[t * layer.input_size + k];
            }
            cache.dropout_masks.push_back(std::move(mask));
        }
        LstmState state = LstmState::zeros(layer.hidden_size);
        auto& steps = cache.steps[l];
        steps.reserve(T);
        for (std::size_t t = 0; t < T; ++t) {
            auto [next, step] = lstm_cell_forward(sequence[t], state, layer);
            sequence[t] = next.h;
            state = std::move(next);
            steps.push_back(std::move(step));
        }
    }
    cache.final_hidden = sequence[T - 1];
    cache.head_output = head_output(network.head, cache.final_hidden);
    result.prediction = cache.head_output;
    return result;
}

double predict(const LstmNetwork& network, const Matrix& window) {
    check_window(network, window);
    const std::size_t T = network.config.window_size;
    std::vector<std::vector<double>> sequence(T);
    for (std::size_t t = 0; t < T; ++t) {
        sequence[t].assign(window.row(t).begin(), window.row(t).end());
        check_finite(sequence[t]);
    }
    std::vector<double> gates;
    for (const auto& layer : network.layers) {
        const std::size_t H = layer.hidden_size;
        std::vector<double> h(H, 0.0), c(H, 0.0);
        for (std::size_t t = 0; t < T; ++t) {
            gate_activations(layer, sequence[t], h, gates);
            for (std::size_t j = 0; j < H; ++j) {
                c[j] = gates[kForgetGate * H + j] * c[j] + gates[kInputGate * H + j] * gates[kCandidateGate * H + j];
                h[j] = gates[kOutputGate * H + j] * std::tanh(c[j]);
            }
            sequence[t] = h;
        }
    }
    return head_output(network.head, sequence[T - 1]);
}

Gradients zero_gradients(const LstmNetwork& network) {
    Gradients g;
    for (const auto& layer : network.layers) g.layers.push_back(LstmParams::zeros(layer.input_size, layer.hidden_size));
    g.head_weights.assign(network.head.weights.size(), 0.0);
    return g;
}

void accumulate_backward(const LstmNetwork& network, const ForwardCache& cache, double dz, Gradients& grads) {
    const std::size_t L = network.layers.size();
    if (cache.steps.size() != L || cache.layer_sizes != network.config.layer_sizes ||
        cache.window_size != network.config.window_size || cache.final_hidden.empty()) {
        throw ContractError("forward cache does not belong to this network");
    }
    if (grads.layers.size() != L) throw ContractError("gradient buffer does not match network");
    const std::size_t T = cache.window_size;

    double dpre = dz;
    if (network.head.activation == HeadActivation::Sigmoid) {
        dpre *= cache.head_output * (1.0 - cache.head_output);
    }
    for (std::size_t j = 0; j < cache.final_hidden.size(); ++j) grads.head_weights[j] += dpre * cache.final_hidden[j];
    grads.head_bias += dpre;

    // Gradient flowing into each layer's hidden output at every step.
    std::vector<std::vector<double>> dh_above(T, std::vector<double>(network.layers.back().hidden_size, 0.0));
    for (std::size_t j = 0; j < network.head.weights.size(); ++j) dh_above[T - 1][j] = dpre * network.head.weights[j];

    std::vector<double> da;
    for (std::size_t l = L; l-- > 0;) {
        const auto& layer = network.layers[l];
        auto& g = grads.layers[l];
        const std::size_t H = layer.hidden_size;
        const std::size_t I = layer.input_size;
        std::vector<double> dh_next(H, 0.0), dc_next(H, 0.0);
        std::vector<std::vector<double>> dx(T, std::vector<double>(I, 0.0));
        da.assign(kGateCount * H, 0.0);

        for (std::size_t t = T; t-- > 0;) {
            const CellCache& s = cache.steps[l][t];
            for (std::size_t j = 0; j < H; ++j) {
                const double i = s.gates[kInputGate * H + j];
                const double f = s.gates[kForgetGate * H + j];
                const double cg = s.gates[kCandidateGate * H + j];
                const double o = s.gates[kOutputGate * H + j];
                const double tc = s.tanh_c[j];
                const double dh = dh_above[t][j] + dh_next[j];
                const double dc = dc_next[j] + dh * o * (1.0 - tc * tc);
                da[kInputGate * H + j] = dc * cg * i * (1.0 - i);
                da[kForgetGate * H + j] = dc * s.c_prev[j] * f * (1.0 - f);
                da[kCandidateGate * H + j] = dc * i * (1.0 - cg * cg);
                da[kOutputGate * H + j] = dh * tc * o * (1.0 - o);
                dc_next[j] = dc * f;
            }
            std::fill(dh_next.begin(), dh_next.end(), 0.0);
            for (std::size_t r = 0; r < kGateCount * H; ++r) {
                const double a = da[r];
                if (a == 0.0) continue;
                g.bias[r] += a;
                double* gwx = g.w_x.data() + r * I;
                const double* wx = layer.w_x.data() + r * I;
                for (std::size_t k = 0; k < I; ++k) {
                    gwx[k] += a * s.x[k];
                    dx[t][k] += a * wx[k];
                }
                double* gwh = g.w_h.data() + r * H;
                const double* wh = layer.w_h.data() + r * H;
                for (std::size_t k = 0; k < H; ++k) {
                    gwh[k] += a * s.h_prev[k];
                    dh_next[k] += a * wh[k];
                }
            }
        }

        if (l > 0) {
            // Layer l consumed (mask ⊙ h) of layer l-1.
            const bool masked = !cache.dropout_masks.empty();
            for (std::size_t t = 0; t < T; ++t) {
                for (std::size_t k = 0; k < I; ++k) {
                    const double m = masked ? cache.dropout_masks[l - 1][t * I + k] : 1.0;
                    dx[t][k] *= m;
                }
            }
            dh_above = std::move(dx);
        }
    }
}

Gradients backward(const LstmNetwork& network, const ForwardCache& cache, double dz) {
    Gradients g = zero_gradients(network);
    accumulate_backward(network, cache, dz, g);
    return g;
}

std::vector<std::span<double>> parameter_tensors(LstmNetwork& network) {
    std::vector<std::span<double>> out;
    for (auto& layer : network.layers) {
        out.emplace_back(layer.w_x);
        out.emplace_back(layer.w_h);
        out.emplace_back(layer.bias);
    }
    out.emplace_back(network.head.weights);
    out.emplace_back(&network.head.bias, 1);
    return out;
}

std::vector<std::span<const double>> parameter_tensors(const LstmNetwork& network) {
    std::vector<std::span<const double>> out;
    for (const auto& layer : network.layers) {
        out.emplace_back(layer.w_x);
        out.emplace_back(layer.w_h);
        out.emplace_back(layer.bias);
    }
    out.emplace_back(network.head.weights);
    out.emplace_back(&network.head.bias, 1);
    return out;
}

std::vector<std::span<double>> gradient_tensors(Gradients& grads) {
    std::vector<std::span<double>> out;
    for (auto& layer : grads.layers) {
        out.emplace_back(layer.w_x);
        out.emplace_back(layer.w_h);
        out.emplace_back(layer.bias);
    }
    out.emplace_back(grads.head_weights);
    out.emplace_back(&grads.head_bias, 1);
    return out;
}

std::vector<std::string> parameter_names(const LstmNetwork& network) {
    std::vector<std::string> out;
    for (std::size_t l = 0; l < network.layers.size(); ++l) {
        const auto prefix = "lstm" + std::to_string(l) + ".";
        out.push_back(prefix + "w_x");
        out.push_back(prefix + "w_h");
        out.push_back(prefix + "bias");
    }
    out.emplace_back("dense.weights");
    out.emplace_back("dense.bias");
    return out;
}

} // namespace stockcast
