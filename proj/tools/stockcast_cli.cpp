// stockcast: command-line front end for ingestion, analysis, training,
// evaluation and the window/sentiment sensitivity sweep.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "stockcast/errors.hpp"
#include "stockcast/pipeline.hpp"

namespace {

struct Overrides {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<std::string> frame;
    std::optional<std::string> checkpoint;
    std::optional<std::size_t> epochs;
    std::optional<std::size_t> window;
    std::optional<std::string> kind;
    std::optional<std::size_t> length;
    bool paper_faithful = false;
    bool no_sentiment = false;
};

stockcast::RunConfig resolve_config(const Overrides& o) {
    stockcast::RunConfig cfg = o.config_path.empty() ? stockcast::RunConfig{} : stockcast::load_run_config(o.config_path);
    if (o.seed) cfg.set_seed(*o.seed);
    if (o.out_dir) cfg.out_dir = *o.out_dir;
    if (o.frame) cfg.frame = *o.frame;
    if (o.checkpoint) cfg.checkpoint = *o.checkpoint;
    if (o.epochs) cfg.train.epochs = *o.epochs;
    if (o.window) cfg.network.window_size = *o.window;
    if (o.kind) cfg.synthetic_kind = *o.kind;
    if (o.length) cfg.synthetic_length = *o.length;
    if (o.paper_faithful) cfg.paper_faithful = true;
    if (o.no_sentiment) cfg.use_sentiment = false;
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"LSTM stock price forecasting with news sentiment features"};
    app.require_subcommand(1);
    app.fallthrough();

    Overrides o;
    app.add_option("--config", o.config_path, "JSON run configuration")->check(CLI::ExistingFile);
    app.add_option("--seed", o.seed, "Seed for initialization, dropout and synthetic data");
    app.add_option("--out", o.out_dir, "Output directory");
    app.add_option("--frame", o.frame, "Feature frame CSV (train/evaluate/sensitivity)");
    app.add_option("--checkpoint", o.checkpoint, "Checkpoint path");
    app.add_option("--epochs", o.epochs, "Maximum training epochs");
    app.add_option("--window", o.window, "Sliding window length");
    app.add_flag("--paper-faithful", o.paper_faithful, "Fit scalers on the full series before splitting");
    app.add_flag("--no-sentiment", o.no_sentiment, "Disable the sentiment feature");

    auto* ingest = app.add_subcommand("ingest", "Clean prices, score news, write feature frames and scalers");
    auto* analyze = app.add_subcommand("analyze", "Returns, correlations, risk/return and histograms");
    auto* train = app.add_subcommand("train", "Train the LSTM and write checkpoint + history");
    auto* evaluate = app.add_subcommand("evaluate", "Score the checkpoint on the test split");
    auto* sensitivity = app.add_subcommand("sensitivity", "MAPE across window sizes with/without sentiment");
    auto* synthetic = app.add_subcommand("synthetic", "Generate sine or sentiment-coupled fixtures");
    synthetic->add_option("--kind", o.kind, "sine | sentiment");
    synthetic->add_option("--length", o.length, "Number of trading days");

    CLI11_PARSE(app, argc, argv);

    try {
        const auto cfg = resolve_config(o);
        if (ingest->parsed()) {
            stockcast::cmd_ingest(cfg, std::cout);
        } else if (analyze->parsed()) {
            stockcast::cmd_analyze(cfg, std::cout);
        } else if (train->parsed()) {
            stockcast::cmd_train(cfg, std::cout);
        } else if (evaluate->parsed()) {
            stockcast::cmd_evaluate(cfg, std::cout);
        } else if (sensitivity->parsed()) {
            stockcast::cmd_sensitivity(cfg, std::cout);
        } else if (synthetic->parsed()) {
            stockcast::cmd_synthetic(cfg, std::cout);
        }
    } catch (const stockcast::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
