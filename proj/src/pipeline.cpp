#include "stockcast/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <limits>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "stockcast/checkpoint.hpp"
#include "stockcast/errors.hpp"
#include "stockcast/features.hpp"
#include "stockcast/sentiment.hpp"
#include "stockcast/synthetic.hpp"
#include "stockcast/text.hpp"

namespace stockcast {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string ma_name(std::size_t k) { return "ma" + std::to_string(k); }

std::string resolve(const std::string& base_dir, const std::string& path) {
    if (path.empty() || base_dir.empty() || fs::path(path).is_absolute()) return path;
    return (fs::path(base_dir) / path).string();
}

template <class T>
void read_if(const json& obj, const char* key, T& dest) {
    if (obj.contains(key)) dest = obj.at(key).get<T>();
}

std::vector<std::pair<std::string, std::string>> read_path_map(const json& node, const std::string& base_dir,
                                                               const char* what) {
    std::vector<std::pair<std::string, std::string>> out;
    if (node.is_string()) {
        out.emplace_back("*", resolve(base_dir, node.get<std::string>()));
    } else if (node.is_object()) {
        for (const auto& [ticker, path] : node.items()) out.emplace_back(ticker, resolve(base_dir, path.get<std::string>()));
    } else {
        throw ConfigError(std::string(what) + " must be a path or an object of ticker -> path");
    }
    return out;
}

// Opens an output file, runs `body`, and fails loudly if anything did not reach disk.
template <class Body>
std::string write_file(const std::string& path, Body&& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot create output file '" + path + "'");
    body(out);
    out.flush();
    if (!out) throw Error("failed writing '" + path + "'");
    return path;
}

void ensure_out_dir(const RunConfig& config) {
    std::error_code ec;
    fs::create_directories(config.out_dir, ec);
    if (ec) throw Error("cannot create output directory '" + config.out_dir + "': " + ec.message());
}

OhlcvSeries load_clean(const RunConfig& config, const std::string& ticker, const std::string& path,
                       PriceColumn column) {
    auto series = drop_missing(load_ohlcv_csv(path, ticker));
    if (series.size() >= 2) series = treat_outliers(series, config.outlier_threshold, config.outlier_mode, column);
    return series;
}

std::string news_path_for(const RunConfig& config, const std::string& ticker) {
    for (const auto& [t, path] : config.news) {
        if (t == ticker) return path;
    }
    for (const auto& [t, path] : config.news) {
        if (t == "*") return path;
    }
    return {};
}

DataOptions data_options(const RunConfig& config, const FeatureFrame& frame) {
    DataOptions data;
    data.window_size = config.network.window_size;
    data.target_column = config.target_name();
    data.feature_columns = config.feature_columns(frame);
    data.split_ratio = config.split_ratio;
    data.paper_faithful = config.paper_faithful;
    return data;
}

} // namespace

void RunConfig::set_seed(std::uint64_t value) {
    seed = value;
    network.seed = value;
    train.seed = value;
}

std::string RunConfig::model_ticker() const {
    if (!ticker.empty()) return ticker;
    if (!prices.empty()) return prices.front().first;
    throw ConfigError("no ticker configured (set 'ticker' or 'prices')");
}

std::string RunConfig::frame_path() const {
    return frame.empty() ? output_path(model_ticker() + "_frame.csv") : frame;
}

std::string RunConfig::checkpoint_path() const {
    return checkpoint.empty() ? output_path("model.ckpt") : checkpoint;
}

std::string RunConfig::output_path(const std::string& name) const { return (fs::path(out_dir) / name).string(); }

std::vector<std::string> RunConfig::feature_columns(const FeatureFrame& frame) const {
    std::vector<std::string> cols{target_name()};
    if (use_sentiment && frame.has_column("sentiment")) cols.emplace_back("sentiment");
    if (ma_as_inputs) {
        for (auto k : moving_averages) cols.push_back(ma_name(k));
    }
    return cols;
}

RunConfig parse_run_config(const std::string& json_text, const std::string& base_dir) {
    RunConfig cfg;
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("invalid config JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    try {
        if (j.contains("prices")) {
            cfg.prices = read_path_map(j["prices"], base_dir, "prices");
            for (const auto& [t, p] : cfg.prices) {
                if (t == "*") throw ConfigError("prices must map tickers to files");
            }
        }
        if (j.contains("news")) cfg.news = read_path_map(j["news"], base_dir, "news");
        if (j.contains("lexicon")) cfg.lexicon = resolve(base_dir, j["lexicon"].get<std::string>());
        read_if(j, "ticker", cfg.ticker);
        if (j.contains("out")) cfg.out_dir = resolve(base_dir, j["out"].get<std::string>());
        if (j.contains("frame")) cfg.frame = resolve(base_dir, j["frame"].get<std::string>());
        if (j.contains("checkpoint")) cfg.checkpoint = resolve(base_dir, j["checkpoint"].get<std::string>());
        if (j.contains("target_column")) cfg.target = parse_price_column(j["target_column"].get<std::string>());
        if (j.contains("returns_column")) cfg.returns_column = parse_price_column(j["returns_column"].get<std::string>());
        if (j.contains("features")) {
            const auto& f = j["features"];
            read_if(f, "sentiment", cfg.use_sentiment);
            read_if(f, "moving_averages", cfg.moving_averages);
            read_if(f, "ma_as_inputs", cfg.ma_as_inputs);
        }
        if (j.contains("outliers")) {
            const auto& o = j["outliers"];
            read_if(o, "threshold", cfg.outlier_threshold);
            if (o.contains("mode")) {
                const auto mode = o["mode"].get<std::string>();
                if (mode == "cap") {
                    cfg.outlier_mode = OutlierMode::Cap;
                } else if (mode == "remove") {
                    cfg.outlier_mode = OutlierMode::Remove;
                } else {
                    throw ConfigError("outliers.mode must be 'cap' or 'remove'");
                }
            }
        }
        read_if(j, "split_ratio", cfg.split_ratio);
        read_if(j, "paper_faithful", cfg.paper_faithful);
        if (j.contains("model")) {
            const auto& m = j["model"];
            read_if(m, "window_size", cfg.network.window_size);
            read_if(m, "layers", cfg.network.layer_sizes);
            read_if(m, "dropout", cfg.network.dropout_rate);
            if (m.contains("head")) {
                const auto head = m["head"].get<std::string>();
                if (head == "linear") {
                    cfg.network.head = HeadActivation::Linear;
                } else if (head == "sigmoid") {
                    cfg.network.head = HeadActivation::Sigmoid;
                } else {
                    throw ConfigError("model.head must be 'linear' or 'sigmoid'");
                }
            }
        }
        if (j.contains("training")) {
            const auto& t = j["training"];
            read_if(t, "epochs", cfg.train.epochs);
            read_if(t, "batch_size", cfg.train.batch_size);
            read_if(t, "learning_rate", cfg.train.learning_rate);
            read_if(t, "patience", cfg.train.patience);
            read_if(t, "validation_fraction", cfg.train.validation_fraction);
        }
        if (j.contains("sensitivity")) {
            read_if(j["sensitivity"], "windows", cfg.sensitivity_windows);
            read_if(j["sensitivity"], "ablation", cfg.ablation);
        }
        if (j.contains("analysis")) read_if(j["analysis"], "histogram_bins", cfg.histogram_bins);
        if (j.contains("synthetic")) {
            const auto& s = j["synthetic"];
            read_if(s, "kind", cfg.synthetic_kind);
            read_if(s, "length", cfg.synthetic_length);
            read_if(s, "noise", cfg.synthetic_noise);
        }
        std::uint64_t seed = cfg.seed;
        read_if(j, "seed", seed);
        cfg.set_seed(seed);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    }
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_run_config(buf.str(), fs::path(path).parent_path().string());
}

FeatureFrame build_frame(const OhlcvSeries& cleaned, const RunConfig& config, const std::vector<ScoredNews>* news) {
    FeatureFrame frame;
    frame.dates = bar_dates(cleaned);
    const auto target = price_values(cleaned, config.target);
    frame.add_column(config.target_name(), target);
    if (news != nullptr) frame.add_column("sentiment", aggregate_daily(*news, frame.dates).score);
    for (auto k : config.moving_averages) {
        std::vector<double> col(target.size(), std::numeric_limits<double>::quiet_NaN());
        if (k <= target.size()) {
            const auto ma = moving_average(target, k);
            for (std::size_t i = 0; i < ma.size(); ++i) {
                if (ma[i]) col[i] = *ma[i];
            }
        }
        frame.add_column(ma_name(k), std::move(col));
    }
    return frame;
}

std::vector<std::string> cmd_ingest(const RunConfig& config, std::ostream& log) {
    if (config.prices.empty()) throw ConfigError("ingest needs at least one prices file");
    ensure_out_dir(config);
    std::optional<SentimentLexicon> lexicon;
    if (config.use_sentiment) lexicon = config.lexicon.empty() ? default_lexicon() : load_lexicon(config.lexicon);

    std::vector<std::string> written;
    for (const auto& [ticker, path] : config.prices) {
        const auto series = load_clean(config, ticker, path, config.target);
        std::vector<ScoredNews> scored;
        if (config.use_sentiment) {
            const auto news_path = news_path_for(config, ticker);
            if (news_path.empty()) throw ConfigError("sentiment is enabled but no news file is configured for " + ticker);
            if (!fs::exists(news_path)) throw Error("news file '" + news_path + "' does not exist");
            scored = score_news(load_news_jsonl(news_path), *lexicon);
        }
        const auto frame = build_frame(series, config, config.use_sentiment ? &scored : nullptr);

        const auto model_cols = config.feature_columns(frame);
        const auto defined = drop_undefined_rows(select_columns(frame, model_cols));
        std::size_t fit_rows = defined.rows();
        if (!config.paper_faithful && defined.rows() > config.network.window_size) {
            fit_rows = training_row_count(defined.rows(), config.network.window_size, config.split_ratio);
        } else if (!config.paper_faithful) {
            log << "warning: " << ticker << " has too few rows for window " << config.network.window_size
                << "; scalers fitted on all rows\n";
        }
        const auto scalers = fit_frame_scalers(defined, fit_rows);

        written.push_back(write_file(config.output_path(ticker + "_frame.csv"),
                                     [&](std::ostream& out) { write_frame_csv(out, frame); }));
        written.push_back(write_file(config.output_path(ticker + "_scalers.csv"),
                                     [&](std::ostream& out) { write_scalers_csv(out, scalers); }));
        log << ticker << ": " << frame.rows() << " rows, " << frame.names.size() << " columns\n";
    }
    return written;
}

std::vector<std::string> cmd_analyze(const RunConfig& config, std::ostream& log) {
    if (config.prices.empty()) throw ConfigError("analyze needs at least one prices file");
    ensure_out_dir(config);

    std::vector<OhlcvSeries> all;
    for (const auto& [ticker, path] : config.prices) {
        all.push_back(load_clean(config, ticker, path, config.returns_column));
        if (all.back().size() < 2) throw InsufficientDataError(ticker + " has fewer than 2 usable rows");
    }

    // Dates present in every series.
    std::vector<Date> common = bar_dates(all.front());
    for (std::size_t k = 1; k < all.size(); ++k) {
        const auto dates = bar_dates(all[k]);
        std::vector<Date> merged;
        std::set_intersection(common.begin(), common.end(), dates.begin(), dates.end(), std::back_inserter(merged));
        common = std::move(merged);
    }
    if (common.size() < 3) throw InsufficientDataError("tickers share fewer than 3 trading days");

    std::vector<NamedSeries> aligned_prices, aligned_returns, full_returns;
    for (const auto& series : all) {
        std::vector<double> px;
        std::size_t j = 0;
        for (const auto& bar : series.bars) {
            if (j < common.size() && bar.date == common[j]) {
                px.push_back(config.returns_column == PriceColumn::Close ? bar.close : bar.adj_close);
                ++j;
            }
        }
        aligned_returns.push_back({series.ticker, daily_returns(px)});
        aligned_prices.push_back({series.ticker, std::move(px)});
        full_returns.push_back({series.ticker, daily_returns(price_values(series, config.returns_column))});
    }

    std::vector<std::string> written;
    written.push_back(write_file(config.output_path("returns.csv"), [&](std::ostream& out) {
        out << "Date";
        for (const auto& s : aligned_returns) out << ',' << s.name;
        out << '\n';
        for (std::size_t i = 0; i + 1 < common.size(); ++i) {
            out << format_date(common[i + 1]);
            for (const auto& s : aligned_returns) out << ',' << format_double(s.values[i]);
            out << '\n';
        }
    }));
    written.push_back(write_file(config.output_path("correlation_returns.csv"), [&](std::ostream& out) {
        write_correlation_csv(out, pearson_matrix(aligned_returns));
    }));
    written.push_back(write_file(config.output_path("correlation_prices.csv"), [&](std::ostream& out) {
        write_correlation_csv(out, pearson_matrix(aligned_prices));
    }));
    written.push_back(write_file(config.output_path("risk_return.csv"), [&](std::ostream& out) {
        out << "ticker,mu,sigma\n";
        for (const auto& p : risk_return(full_returns)) {
            out << p.ticker << ',' << format_double(p.mu) << ',' << format_double(p.sigma) << '\n';
        }
    }));
    written.push_back(write_file(config.output_path("return_histogram.csv"), [&](std::ostream& out) {
        out << "ticker,bin_lo,bin_hi,count\n";
        for (const auto& s : full_returns) {
            for (const auto& b : histogram(s.values, config.histogram_bins)) {
                out << s.name << ',' << format_double(b.lo) << ',' << format_double(b.hi) << ',' << b.count << '\n';
            }
        }
    }));
    log << "analyzed " << all.size() << " tickers over " << common.size() << " shared days\n";
    return written;
}

TrainSummary cmd_train(const RunConfig& config, std::ostream& log) {
    ensure_out_dir(config);
    const auto frame = load_frame_csv(config.frame_path());
    const auto data = data_options(config, frame);
    const auto prepared = prepare_data(frame, data);

    NetworkConfig net_cfg = config.network;
    net_cfg.n_features = data.feature_columns.size();
    auto result = train(init_params(net_cfg), prepared.train, config.train);

    Checkpoint ck;
    ck.kind = ModelKind::Lstm;
    ck.network = std::move(result.network);
    ck.optimizer = std::move(result.optimizer);
    ck.seed = config.seed;
    ck.target_column = data.target_column;
    ck.feature_columns = data.feature_columns;
    ck.scalers = prepared.scalers;
    ck.split_ratio = config.split_ratio;
    save_checkpoint(config.checkpoint_path(), ck);
    write_file(config.output_path("history.csv"), [&](std::ostream& out) { write_history_csv(out, result.history); });

    TrainSummary summary;
    summary.best_epoch = result.history.best_epoch;
    summary.stopped_epoch = result.history.stopped_epoch;
    summary.best_val_loss = result.history.best_val_loss;
    summary.first_val_loss = result.history.epochs.front().val_loss;
    log << "trained " << summary.stopped_epoch << " epochs; best epoch " << summary.best_epoch
        << ", validation loss " << format_double(summary.best_val_loss) << '\n';
    return summary;
}

EvaluateSummary cmd_evaluate(const RunConfig& config, std::ostream& log) {
    ensure_out_dir(config);
    const auto ck = load_checkpoint(config.checkpoint_path());
    const auto frame = load_frame_csv(config.frame_path());
    for (const auto& col : ck.feature_columns) {
        if (!frame.has_column(col)) {
            throw ShapeError("checkpoint expects column '" + col + "' which the frame does not have");
        }
    }
    DataOptions data;
    data.window_size = ck.network.config.window_size;
    data.target_column = ck.target_column;
    data.feature_columns = ck.feature_columns;
    data.split_ratio = ck.split_ratio;
    const auto prepared = prepare_data(frame, data, ck.scalers);

    const Forecaster forecaster =
        ck.kind == ModelKind::Identity ? identity_forecaster() : network_forecaster(ck.network);
    const auto series = predict_series(forecaster, scaler_for(prepared.scalers, ck.target_column), prepared.test);
    for (const auto& w : series.warnings) log << "warning: " << w << '\n';

    EvaluateSummary summary;
    summary.metrics = compute_metrics(series.actual, series.forecast);
    summary.warnings = series.warnings;
    write_file(config.output_path("metrics.txt"), [&](std::ostream& out) { write_metrics_table(out, summary.metrics); });
    write_file(config.output_path("metrics.json"), [&](std::ostream& out) { write_metrics_json(out, summary.metrics); });
    write_file(config.output_path("predictions.csv"), [&](std::ostream& out) { write_predictions_csv(out, series); });
    write_metrics_table(log, summary.metrics);
    return summary;
}

std::vector<SensitivityCell> cmd_sensitivity(const RunConfig& config, std::ostream& log) {
    ensure_out_dir(config);
    const auto frame = load_frame_csv(config.frame_path());
    SensitivityOptions opts;
    opts.windows = config.sensitivity_windows;
    opts.ablation = config.ablation && frame.has_column("sentiment");
    opts.with_sentiment = config.use_sentiment && frame.has_column("sentiment");
    opts.target_column = config.target_name();
    if (config.ma_as_inputs) {
        for (auto k : config.moving_averages) opts.extra_features.push_back(ma_name(k));
    }
    opts.split_ratio = config.split_ratio;
    opts.paper_faithful = config.paper_faithful;
    opts.network = config.network;
    opts.train = config.train;
    const auto cells = window_sensitivity(frame, opts);
    write_file(config.output_path("sensitivity.csv"), [&](std::ostream& out) { write_sensitivity_csv(out, cells); });
    for (const auto& c : cells) {
        log << "window " << c.window << " sentiment " << (c.with_sentiment ? "on " : "off") << "  MAPE ";
        if (c.mape) {
            log << format_double(*c.mape) << " %\n";
        } else {
            log << "n/a (" << c.note << ")\n";
        }
    }
    return cells;
}

std::vector<std::string> cmd_synthetic(const RunConfig& config, std::ostream& log) {
    ensure_out_dir(config);
    SyntheticData data;
    if (config.synthetic_kind == "sine") {
        data = sine_series(config.synthetic_length);
    } else if (config.synthetic_kind == "sentiment") {
        data = sentiment_coupled_series(config.synthetic_length, config.seed, config.synthetic_noise);
    } else {
        throw ConfigError("unknown synthetic kind '" + config.synthetic_kind + "' (expected sine or sentiment)");
    }
    const std::string stem = "synthetic_" + config.synthetic_kind;
    std::vector<std::string> written;
    written.push_back(write_file(config.output_path(stem + "_prices.csv"),
                                 [&](std::ostream& out) { write_ohlcv_csv(out, data.prices); }));
    written.push_back(write_file(config.output_path(stem + "_frame.csv"),
                                 [&](std::ostream& out) { write_frame_csv(out, data.frame); }));
    log << "wrote " << data.frame.rows() << " synthetic rows (" << config.synthetic_kind << ")\n";
    return written;
}

} // namespace stockcast
