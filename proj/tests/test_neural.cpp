#include <cmath>
#include <numeric>

#include "doctest.h"
#include "stockcast/errors.hpp"
#include "stockcast/neural.hpp"
#include "stockcast/training.hpp"
#include "test_util.hpp"

using namespace stockcast;
using stockcast::testing::random_network;
using stockcast::testing::random_window;

namespace {

double sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }

NetworkConfig tiny_config(std::size_t window, std::vector<std::size_t> layers, std::size_t features = 2,
                          double dropout = 0.0) {
    NetworkConfig cfg;
    cfg.window_size = window;
    cfg.n_features = features;
    cfg.layer_sizes = std::move(layers);
    cfg.dropout_rate = dropout;
    return cfg;
}

// Straight-line reference: explicit per-gate loops over the gate-block
// accessors, no shared code with the production forward pass.
double reference_forward(LstmNetwork net, const Matrix& window) {
    std::vector<std::vector<double>> seq;
    for (std::size_t t = 0; t < window.rows(); ++t) seq.emplace_back(window.row(t).begin(), window.row(t).end());
    for (auto& layer : net.layers) {
        const std::size_t H = layer.hidden_size, I = layer.input_size;
        std::vector<double> h(H, 0.0), c(H, 0.0);
        for (auto& x : seq) {
            std::vector<double> pre[4];
            for (std::size_t g = 0; g < 4; ++g) {
                auto wx = layer.input_weights(static_cast<Gate>(g));
                auto wh = layer.recurrent_weights(static_cast<Gate>(g));
                auto b = layer.gate_bias(static_cast<Gate>(g));
                pre[g].assign(H, 0.0);
                for (std::size_t j = 0; j < H; ++j) {
                    double a = b[j];
                    for (std::size_t k = 0; k < I; ++k) a += wx[j * I + k] * x[k];
                    for (std::size_t k = 0; k < H; ++k) a += wh[j * H + k] * h[k];
                    pre[g][j] = a;
                }
            }
            std::vector<double> hn(H);
            for (std::size_t j = 0; j < H; ++j) {
                const double i = sig(pre[0][j]), f = sig(pre[1][j]), cc = std::tanh(pre[2][j]), o = sig(pre[3][j]);
                c[j] = f * c[j] + i * cc;
                hn[j] = o * std::tanh(c[j]);
            }
            h = hn;
            x = hn;
        }
    }
    double z = net.head.bias;
    for (std::size_t j = 0; j < net.head.weights.size(); ++j) z += net.head.weights[j] * seq.back()[j];
    return z;
}

} // namespace

TEST_CASE("init_params is deterministic in the seed") {
    NetworkConfig cfg = tiny_config(5, {4, 3});
    cfg.seed = 11;
    CHECK(init_params(cfg) == init_params(cfg));
    NetworkConfig other = cfg;
    other.seed = 12;
    CHECK_FALSE(init_params(cfg) == init_params(other));
}

TEST_CASE("init_params sets forget bias to one and other biases to zero") {
    const auto net = init_params(tiny_config(5, {4, 3}));
    for (const auto& layer : net.layers) {
        for (std::size_t g = 0; g < kGateCount; ++g) {
            for (double b : layer.gate_bias(static_cast<Gate>(g))) CHECK(b == (g == kForgetGate ? 1.0 : 0.0));
        }
    }
    CHECK(net.head.bias == 0.0);
}

TEST_CASE("Glorot weights are bounded with mean near zero") {
    NetworkConfig cfg; // 2 features, [64, 32]
    const auto net = init_params(cfg);
    const auto& w = net.layers[0].w_h; // 4 * 64 * 64 draws, fan_in = fan_out = 64
    REQUIRE(w.size() >= 10000);
    const double limit = std::sqrt(6.0 / 128.0);
    double sum = 0.0;
    for (double v : w) {
        CHECK(std::abs(v) <= limit);
        sum += v;
    }
    const double mean = sum / static_cast<double>(w.size());
    const double se = limit / std::sqrt(3.0) / std::sqrt(static_cast<double>(w.size()));
    CHECK(std::abs(mean) < 3.0 * se);
}

TEST_CASE("zero layer size is a config error") {
    CHECK_THROWS_AS(init_params(tiny_config(3, {2, 0})), ConfigError);
    CHECK_THROWS_AS(init_params(tiny_config(3, {})), ConfigError);
    CHECK_THROWS_AS(init_params(tiny_config(3, {2}, 2, 1.0)), ConfigError);
}

TEST_CASE("cell with all-zero parameters and state stays at zero") {
    const auto p = LstmParams::zeros(3, 4);
    const std::vector<double> x(3, 0.0);
    auto [state, cache] = lstm_cell_forward(x, LstmState::zeros(4), p);
    for (std::size_t j = 0; j < 4; ++j) {
        CHECK(state.h[j] == 0.0);
        CHECK(state.c[j] == 0.0);
        CHECK(cache.gates[kInputGate * 4 + j] == 0.5);
        CHECK(cache.gates[kForgetGate * 4 + j] == 0.5);
        CHECK(cache.gates[kCandidateGate * 4 + j] == 0.0);
        CHECK(cache.gates[kOutputGate * 4 + j] == 0.5);
    }
}

TEST_CASE("scalar cell matches hand-evaluated gate equations") {
    auto p = LstmParams::zeros(1, 1);
    // gate order: input, forget, candidate, output
    p.w_x = {0.5, -0.3, 0.8, 0.1};
    p.w_h = {0.2, 0.4, -0.6, 0.7};
    p.bias = {0.1, 1.0, -0.2, 0.05};
    const double x = 0.9, h0 = -0.25, c0 = 0.6;

    const double i = sig(0.5 * x + 0.2 * h0 + 0.1);
    const double f = sig(-0.3 * x + 0.4 * h0 + 1.0);
    const double g = std::tanh(0.8 * x - 0.6 * h0 - 0.2);
    const double o = sig(0.1 * x + 0.7 * h0 + 0.05);
    const double c1 = f * c0 + i * g;
    const double h1 = o * std::tanh(c1);

    const std::vector<double> xv{x};
    auto [state, cache] = lstm_cell_forward(xv, LstmState{{h0}, {c0}}, p);
    CHECK(state.c[0] == doctest::Approx(c1).epsilon(1e-14));
    CHECK(state.h[0] == doctest::Approx(h1).epsilon(1e-14));
}

TEST_CASE("saturated cell with open output gate emits tanh(c) below one") {
    auto p = LstmParams::zeros(1, 1);
    p.bias = {0.0, 40.0, 0.0, 40.0}; // forget and output gates pinned at 1
    const std::vector<double> x{0.0};
    auto [state, cache] = lstm_cell_forward(x, LstmState{{0.0}, {8.0}}, p);
    CHECK(state.c[0] == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(state.h[0] < 1.0);
    CHECK(state.h[0] == doctest::Approx(std::tanh(8.0)).epsilon(1e-12));
}

TEST_CASE("cell rejects non-finite input and wrong sizes") {
    const auto p = LstmParams::zeros(2, 2);
    const std::vector<double> bad{1.0, std::nan("")};
    CHECK_THROWS_AS(lstm_cell_forward(bad, LstmState::zeros(2), p), NumericError);
    const std::vector<double> short_x{1.0};
    CHECK_THROWS_AS(lstm_cell_forward(short_x, LstmState::zeros(2), p), ShapeError);
}

TEST_CASE("forward: dropout 0 makes train and infer identical") {
    const auto net = random_network(tiny_config(6, {5, 4}, 2, 0.0), 3);
    const auto w = random_window(6, 2, 9);
    Rng rng(1);
    CHECK(forward(net, w, Mode::Train, &rng).prediction == forward(net, w, Mode::Infer).prediction);
    CHECK(predict(net, w) == forward(net, w, Mode::Infer).prediction);
}

TEST_CASE("forward: all-zero network predicts zero") {
    const auto net = zero_network(tiny_config(4, {3, 2}));
    CHECK(forward(net, random_window(4, 2, 5), Mode::Infer).prediction == 0.0);
}

TEST_CASE("forward matches a straight-line reference on a tiny network") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto net = random_network(tiny_config(3, {2, 2}), seed, 1.0);
        const auto w = random_window(3, 2, seed + 100);
        CHECK(forward(net, w, Mode::Infer).prediction == doctest::Approx(reference_forward(net, w)).epsilon(1e-13));
    }
}

TEST_CASE("forward rejects a mismatched window") {
    const auto net = zero_network(tiny_config(4, {3, 2}));
    CHECK_THROWS_AS(forward(net, Matrix(5, 2), Mode::Infer), ShapeError);
    CHECK_THROWS_AS(predict(net, Matrix(4, 3)), ShapeError);
}

TEST_CASE("activations stay within their ranges") {
    const auto net = random_network(tiny_config(8, {6, 4}), 17, 2.0);
    const auto result = forward(net, random_window(8, 2, 3), Mode::Infer);
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const std::size_t H = net.layers[l].hidden_size;
        for (const auto& step : result.cache.steps[l]) {
            for (std::size_t j = 0; j < H; ++j) {
                for (Gate g : {kInputGate, kForgetGate, kOutputGate}) {
                    CHECK(step.gates[g * H + j] > 0.0);
                    CHECK(step.gates[g * H + j] < 1.0);
                }
                CHECK(std::abs(step.gates[kCandidateGate * H + j]) < 1.0);
                CHECK(std::abs(step.gates[kOutputGate * H + j] * step.tanh_c[j]) < 1.0);
            }
        }
    }
}

TEST_CASE("backward: zero upstream gradient gives zero gradients") {
    const auto net = random_network(tiny_config(4, {3, 2}), 2);
    const auto result = forward(net, random_window(4, 2, 1), Mode::Infer);
    auto grads = backward(net, result.cache, 0.0);
    for (auto t : gradient_tensors(grads)) {
        for (double v : t) CHECK(v == 0.0);
    }
}

TEST_CASE("backward: dense head gradient is dZ times final hidden state") {
    const auto net = random_network(tiny_config(4, {3, 2}), 4);
    const auto result = forward(net, random_window(4, 2, 8), Mode::Infer);
    const double dz = 0.73;
    const auto grads = backward(net, result.cache, dz);
    CHECK(grads.head_bias == dz);
    for (std::size_t j = 0; j < grads.head_weights.size(); ++j) {
        CHECK(grads.head_weights[j] == dz * result.cache.final_hidden[j]);
    }
}

TEST_CASE("backward rejects a cache from a different network") {
    const auto small = random_network(tiny_config(4, {3, 2}), 4);
    const auto big = random_network(tiny_config(4, {3, 3}), 4);
    const auto result = forward(small, random_window(4, 2, 8), Mode::Infer);
    CHECK_THROWS_AS(backward(big, result.cache, 1.0), ContractError);
    CHECK_THROWS_AS(backward(small, ForwardCache{}, 1.0), ContractError);
}

TEST_CASE("BPTT gradients match central finite differences") {
    for (std::size_t window = 1; window <= 5; ++window) {
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const auto net = random_network(tiny_config(window, {3, 2}), seed);
            const auto w = random_window(window, 2, seed * 31 + window);
            const double target = Rng(seed).uniform();
            const double err = grad_check(net, w, target, 1e-5);
            CAPTURE(window);
            CAPTURE(seed);
            CHECK(err < 1e-5);
        }
    }
}

TEST_CASE("BPTT gradients with a sigmoid head and three layers") {
    auto cfg = tiny_config(4, {3, 2, 2});
    cfg.head = HeadActivation::Sigmoid;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto net = random_network(cfg, seed);
        net.head.activation = HeadActivation::Sigmoid;
        CHECK(grad_check(net, random_window(4, 2, seed), 0.3, 1e-5) < 1e-5);
    }
}

TEST_CASE("train-mode gradients replay the dropout masks") {
    const auto cfg = tiny_config(4, {3, 3}, 2, 0.3);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto net = random_network(cfg, seed);
        const auto w = random_window(4, 2, seed + 50);
        const double target = 0.4;
        const auto loss_at = [&](const LstmNetwork& n) {
            Rng rng(seed); // identical masks on every call
            return mse_loss(forward(n, w, Mode::Train, &rng).prediction, target).loss;
        };
        Rng rng(seed);
        const auto result = forward(net, w, Mode::Train, &rng);
        REQUIRE(result.cache.dropout_masks.size() == 1);
        auto grads = backward(net, result.cache, mse_loss(result.prediction, target).grad);

        auto params = parameter_tensors(net);
        auto analytic = gradient_tensors(grads);
        double worst = 0.0;
        for (std::size_t k = 0; k < params.size(); ++k) {
            for (std::size_t i = 0; i < params[k].size(); ++i) {
                const double saved = params[k][i];
                params[k][i] = saved + 1e-5;
                const double up = loss_at(net);
                params[k][i] = saved - 1e-5;
                const double down = loss_at(net);
                params[k][i] = saved;
                const double numeric = (up - down) / 2e-5;
                worst = std::max(worst, gradient_relative_error(analytic[k][i], numeric));
            }
        }
        CHECK(worst < 1e-5);
    }
}

TEST_CASE("inverted dropout preserves the expected activation") {
    const double rate = 0.2;
    const auto net = random_network(tiny_config(10, {8, 4}, 2, rate), 6);
    const auto w = random_window(10, 2, 2);
    Rng rng(77);
    double sum = 0.0;
    std::size_t n = 0;
    for (int rep = 0; rep < 200; ++rep) {
        const auto r = forward(net, w, Mode::Train, &rng);
        for (double m : r.cache.dropout_masks[0]) {
            CHECK((m == 0.0 || m == doctest::Approx(1.0 / (1.0 - rate))));
            sum += m;
            ++n;
        }
    }
    // Each mask entry has mean 1 and variance rate / (1 - rate).
    const double se = std::sqrt(rate / (1.0 - rate) / static_cast<double>(n));
    CHECK(std::abs(sum / static_cast<double>(n) - 1.0) < 3.0 * se);
}

TEST_CASE("train-mode forward is reproducible for a fixed rng seed") {
    const auto net = random_network(tiny_config(6, {5, 4}, 2, 0.5), 8);
    const auto w = random_window(6, 2, 4);
    Rng a(5), b(5);
    CHECK(forward(net, w, Mode::Train, &a).prediction == forward(net, w, Mode::Train, &b).prediction);
    CHECK_THROWS_AS(forward(net, w, Mode::Train, nullptr), ContractError);
}
