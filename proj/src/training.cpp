#include "stockcast/training.hpp"

#include <algorithm>
#include <cmath>

#include "stockcast/errors.hpp"
#include "stockcast/text.hpp"

namespace stockcast {

void TrainConfig::validate() const {
    if (epochs == 0 || batch_size == 0 || patience == 0) {
        throw ConfigError("epochs, batch_size and patience must be positive");
    }
    if (!(learning_rate >= 0.0)) throw ConfigError("learning_rate must be non-negative");
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0) || !(epsilon > 0.0)) {
        throw ConfigError("invalid Adam hyperparameters");
    }
    if (!(validation_fraction >= 0.0 && validation_fraction < 1.0)) {
        throw ConfigError("validation_fraction must lie in [0, 1)");
    }
}

AdamState AdamState::for_network(const LstmNetwork& network) {
    AdamState state;
    for (auto tensor : parameter_tensors(network)) {
        state.m.emplace_back(tensor.size(), 0.0);
        state.v.emplace_back(tensor.size(), 0.0);
    }
    return state;
}

std::pair<WindowedDataset, WindowedDataset> split_train_test(const WindowedDataset& dataset, double ratio) {
    if (!(ratio > 0.0 && ratio < 1.0)) throw ConfigError("split ratio must lie in (0, 1)");
    const auto n = dataset.size();
    const auto n_train = static_cast<std::size_t>(std::floor(static_cast<double>(n) * ratio));
    if (n_train == 0 || n_train == n) {
        throw InsufficientDataError("split of " + std::to_string(n) + " samples leaves an empty side");
    }
    return {dataset.slice(0, n_train), dataset.slice(n_train, n)};
}

LossValue mse_loss(double prediction, double target) {
    const double diff = prediction - target;
    return {diff * diff, 2.0 * diff};
}

void adam_step(std::span<const std::span<double>> params, std::span<const std::span<double>> grads,
               AdamState& state, const TrainConfig& config) {
    if (params.size() != grads.size() || params.size() != state.m.size() || params.size() != state.v.size()) {
        throw ContractError("Adam tensor count mismatch");
    }
    for (std::size_t k = 0; k < params.size(); ++k) {
        if (params[k].size() != grads[k].size() || params[k].size() != state.m[k].size() ||
            params[k].size() != state.v[k].size()) {
            throw ContractError("Adam tensor shape mismatch");
        }
    }
    ++state.t;
    const double t = static_cast<double>(state.t);
    const double correction1 = 1.0 - std::pow(config.beta1, t);
    const double correction2 = 1.0 - std::pow(config.beta2, t);
    for (std::size_t k = 0; k < params.size(); ++k) {
        auto& m = state.m[k];
        auto& v = state.v[k];
        for (std::size_t i = 0; i < params[k].size(); ++i) {
            const double g = grads[k][i];
            m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * g;
            v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * g * g;
            const double m_hat = m[i] / correction1;
            const double v_hat = v[i] / correction2;
            params[k][i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
        }
    }
}

bool EarlyStopping::update(std::size_t epoch, double loss) {
    improved_ = loss < best_loss_ - min_improvement_;
    if (improved_) {
        best_loss_ = loss;
        best_epoch_ = epoch;
        stale_ = 0;
        return false;
    }
    ++stale_;
    return stale_ >= patience_;
}

double evaluate_loss(const LstmNetwork& network, const WindowedDataset& dataset) {
    if (dataset.size() == 0) throw InsufficientDataError("cannot evaluate loss on an empty dataset");
    double sum = 0.0;
    for (std::size_t i = 0; i < dataset.size(); ++i) sum += mse_loss(predict(network, dataset.X[i]), dataset.y[i]).loss;
    return sum / static_cast<double>(dataset.size());
}

TrainResult train(LstmNetwork network, const WindowedDataset& train_split, const TrainConfig& config) {
    config.validate();
    if (train_split.n_features() != network.config.n_features || train_split.window_size != network.config.window_size) {
        throw ShapeError("dataset shape does not match the network configuration");
    }
    const std::size_t n = train_split.size();
    const auto n_val = static_cast<std::size_t>(std::floor(static_cast<double>(n) * config.validation_fraction));
    if (n_val == 0) throw ConfigError("validation slice is empty; early stopping needs validation data");
    if (n_val >= n) throw ConfigError("validation slice leaves no training samples");
    const WindowedDataset fit = train_split.slice(0, n - n_val);
    const WindowedDataset val = train_split.slice(n - n_val, n);

    Rng rng(config.seed);
    AdamState adam = AdamState::for_network(network);
    EarlyStopping stopper(config.patience, config.min_improvement);
    TrainResult best{network, adam, {}};
    TrainHistory history;

    Gradients grads = zero_gradients(network);
    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        double loss_sum = 0.0;
        for (std::size_t start = 0; start < fit.size(); start += config.batch_size) {
            const std::size_t end = std::min(fit.size(), start + config.batch_size);
            const double scale = 1.0 / static_cast<double>(end - start);
            for (auto g : gradient_tensors(grads)) std::fill(g.begin(), g.end(), 0.0);
            for (std::size_t i = start; i < end; ++i) {
                auto result = forward(network, fit.X[i], Mode::Train, &rng);
                const auto loss = mse_loss(result.prediction, fit.y[i]);
                loss_sum += loss.loss;
                accumulate_backward(network, result.cache, loss.grad * scale, grads);
            }
            adam_step(parameter_tensors(network), gradient_tensors(grads), adam, config);
        }
        const double train_loss = loss_sum / static_cast<double>(fit.size());
        const double val_loss = evaluate_loss(network, val);
        history.epochs.push_back({epoch, train_loss, val_loss});
        history.stopped_epoch = epoch;
        if (!std::isfinite(val_loss)) throw NumericError("validation loss diverged at epoch " + std::to_string(epoch));

        const bool stop = stopper.update(epoch, val_loss);
        if (stopper.improved()) {
            best.network = network;
            best.optimizer = adam;
        }
        if (stop) break;
    }
    history.best_epoch = stopper.best_epoch();
    history.best_val_loss = stopper.best_loss();
    best.history = std::move(history);
    return best;
}

void write_history_csv(std::ostream& out, const TrainHistory& history) {
    out << "epoch,train_loss,val_loss\n";
    for (const auto& e : history.epochs) {
        out << e.epoch << ',' << format_double(e.train_loss) << ',' << format_double(e.val_loss) << '\n';
    }
}

namespace {

// Parameters copied into extended precision, in parameter_tensors() order.
struct WideNetwork {
    std::vector<std::size_t> inputs;
    std::vector<std::size_t> hidden;
    std::vector<std::vector<long double>> tensors;
};

WideNetwork widen(const LstmNetwork& network) {
    WideNetwork wide;
    for (const auto& layer : network.layers) {
        wide.inputs.push_back(layer.input_size);
        wide.hidden.push_back(layer.hidden_size);
    }
    for (auto t : parameter_tensors(network)) wide.tensors.emplace_back(t.begin(), t.end());
    return wide;
}

long double wide_sigmoid(long double x) { return 1.0L / (1.0L + std::exp(-x)); }

long double wide_loss(const WideNetwork& net, const Matrix& window, HeadActivation head, long double target) {
    std::vector<std::vector<long double>> seq(window.rows());
    for (std::size_t t = 0; t < window.rows(); ++t) seq[t].assign(window.row(t).begin(), window.row(t).end());
    for (std::size_t l = 0; l < net.hidden.size(); ++l) {
        const auto& wx = net.tensors[3 * l];
        const auto& wh = net.tensors[3 * l + 1];
        const auto& b = net.tensors[3 * l + 2];
        const std::size_t H = net.hidden[l], I = net.inputs[l];
        std::vector<long double> h(H, 0.0L), c(H, 0.0L), a(4 * H);
        for (auto& x : seq) {
            for (std::size_t r = 0; r < 4 * H; ++r) {
                long double acc = b[r];
                for (std::size_t k = 0; k < I; ++k) acc += wx[r * I + k] * x[k];
                for (std::size_t k = 0; k < H; ++k) acc += wh[r * H + k] * h[k];
                a[r] = acc;
            }
            for (std::size_t j = 0; j < H; ++j) {
                c[j] = wide_sigmoid(a[H + j]) * c[j] + wide_sigmoid(a[j]) * std::tanh(a[2 * H + j]);
                h[j] = wide_sigmoid(a[3 * H + j]) * std::tanh(c[j]);
            }
            x = h;
        }
    }
    const auto& w = net.tensors[net.tensors.size() - 2];
    long double z = net.tensors.back()[0];
    for (std::size_t j = 0; j < w.size(); ++j) z += w[j] * seq.back()[j];
    if (head == HeadActivation::Sigmoid) z = wide_sigmoid(z);
    return (z - target) * (z - target);
}

} // namespace

double gradient_relative_error(double analytic, double numeric) {
    const double scale = std::max(std::abs(analytic), std::abs(numeric));
    if (scale < kGradNegligible) return 0.0;
    return std::abs(analytic - numeric) / std::max(scale, kGradCheckFloor);
}

double grad_check(const LstmNetwork& network, const Matrix& window, double target, double epsilon,
                  const Gradients& analytic) {
    if (!(epsilon > 0.0)) throw ConfigError("grad_check epsilon must be positive");
    if (window.rows() != network.config.window_size || window.cols() != network.config.n_features) {
        throw ShapeError("grad_check window does not match the network");
    }
    WideNetwork wide = widen(network);
    Gradients copy = analytic;
    const auto grads = gradient_tensors(copy);
    if (grads.size() != wide.tensors.size()) throw ContractError("gradient layout does not match network");

    const long double eps = epsilon;
    double worst = 0.0;
    for (std::size_t k = 0; k < wide.tensors.size(); ++k) {
        auto& tensor = wide.tensors[k];
        if (grads[k].size() != tensor.size()) throw ContractError("gradient layout does not match network");
        for (std::size_t i = 0; i < tensor.size(); ++i) {
            const long double saved = tensor[i];
            tensor[i] = saved + eps;
            const long double up = wide_loss(wide, window, network.head.activation, target);
            tensor[i] = saved - eps;
            const long double down = wide_loss(wide, window, network.head.activation, target);
            tensor[i] = saved;
            const auto numeric = static_cast<double>((up - down) / (2.0L * eps));
            worst = std::max(worst, gradient_relative_error(grads[k][i], numeric));
        }
    }
    return worst;
}

double grad_check(const LstmNetwork& network, const Matrix& window, double target, double epsilon) {
    auto result = forward(network, window, Mode::Infer);
    const auto loss = mse_loss(result.prediction, target);
    return grad_check(network, window, target, epsilon, backward(network, result.cache, loss.grad));
}

} // namespace stockcast
