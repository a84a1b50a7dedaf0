#include "stockcast/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "stockcast/errors.hpp"
#include "stockcast/text.hpp"

namespace stockcast {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::size_t column_index(const FeatureFrame& frame, const std::string& name) {
    const auto it = std::find(frame.names.begin(), frame.names.end(), name);
    if (it == frame.names.end()) throw ContractError("frame has no column '" + name + "'");
    return static_cast<std::size_t>(it - frame.names.begin());
}

} // namespace

bool FeatureFrame::has_column(const std::string& name) const {
    return std::find(names.begin(), names.end(), name) != names.end();
}

const std::vector<double>& FeatureFrame::column(const std::string& name) const {
    return columns[column_index(*this, name)];
}

void FeatureFrame::add_column(const std::string& name, std::vector<double> values) {
    if (values.size() != dates.size()) {
        throw ShapeError("column '" + name + "' has " + std::to_string(values.size()) +
                         " rows, frame has " + std::to_string(dates.size()));
    }
    if (has_column(name)) throw ContractError("duplicate frame column '" + name + "'");
    names.push_back(name);
    columns.push_back(std::move(values));
}

WindowedDataset WindowedDataset::slice(std::size_t begin, std::size_t end) const {
    if (begin > end || end > size()) throw ContractError("dataset slice out of range");
    WindowedDataset out;
    out.window_size = window_size;
    out.feature_names = feature_names;
    out.X.assign(X.begin() + begin, X.begin() + end);
    out.y.assign(y.begin() + begin, y.begin() + end);
    out.target_dates.assign(target_dates.begin() + begin, target_dates.begin() + end);
    return out;
}

std::vector<double> daily_returns(std::span<const double> prices) {
    if (prices.size() < 2) throw InsufficientDataError("daily returns need at least 2 prices");
    for (double p : prices) {
        if (!(p > 0.0)) throw DomainError("daily returns need strictly positive prices");
    }
    std::vector<double> out;
    out.reserve(prices.size() - 1);
    for (std::size_t t = 1; t < prices.size(); ++t) out.push_back((prices[t] / prices[t - 1] - 1.0) * 100.0);
    return out;
}

std::vector<std::optional<double>> moving_average(std::span<const double> prices, std::size_t k) {
    if (k == 0) throw DomainError("moving average window must be at least 1");
    if (k > prices.size()) {
        throw InsufficientDataError("moving average window " + std::to_string(k) + " exceeds series length " +
                                    std::to_string(prices.size()));
    }
    std::vector<std::optional<double>> out(prices.size());
    // Running sum, re-seeded every k steps to stop rounding drift from accumulating.
    double sum = 0.0;
    for (std::size_t i = 0; i < prices.size(); ++i) {
        sum += prices[i];
        if (i >= k) sum -= prices[i - k];
        if (i + 1 >= k) {
            if ((i + 1) % k == 0) {
                sum = 0.0;
                for (std::size_t j = i + 1 - k; j <= i; ++j) sum += prices[j];
            }
            out[i] = sum / static_cast<double>(k);
        }
    }
    return out;
}

ScalerParams fit_minmax(std::span<const double> values) {
    ScalerParams params{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    bool any = false;
    for (double v : values) {
        if (std::isnan(v)) continue;
        params.x_min = std::min(params.x_min, v);
        params.x_max = std::max(params.x_max, v);
        any = true;
    }
    if (!any) throw InsufficientDataError("cannot fit min-max scaler on an empty series");
    return params;
}

double transform(double value, const ScalerParams& params) {
    if (params.degenerate()) return 0.0;
    return (value - params.x_min) / (params.x_max - params.x_min);
}

double inverse_transform(double value, const ScalerParams& params) {
    return params.x_min + value * (params.x_max - params.x_min);
}

std::vector<double> transform(std::span<const double> values, const ScalerParams& params) {
    std::vector<double> out;
    out.reserve(values.size());
    for (double v : values) out.push_back(std::isnan(v) ? v : transform(v, params));
    return out;
}

std::vector<double> inverse_transform(std::span<const double> values, const ScalerParams& params) {
    std::vector<double> out;
    out.reserve(values.size());
    for (double v : values) out.push_back(inverse_transform(v, params));
    return out;
}

FeatureFrame select_columns(const FeatureFrame& frame, const std::vector<std::string>& names) {
    FeatureFrame out;
    out.dates = frame.dates;
    for (const auto& name : names) out.add_column(name, frame.column(name));
    return out;
}

FeatureFrame drop_undefined_rows(const FeatureFrame& frame) {
    FeatureFrame out;
    out.names = frame.names;
    out.columns.resize(frame.columns.size());
    for (std::size_t r = 0; r < frame.rows(); ++r) {
        const bool defined = std::none_of(frame.columns.begin(), frame.columns.end(),
                                          [r](const std::vector<double>& c) { return std::isnan(c[r]); });
        if (!defined) continue;
        out.dates.push_back(frame.dates[r]);
        for (std::size_t c = 0; c < frame.columns.size(); ++c) out.columns[c].push_back(frame.columns[c][r]);
    }
    return out;
}

FeatureFrame slice_rows(const FeatureFrame& frame, std::size_t begin, std::size_t end) {
    if (begin > end || end > frame.rows()) throw ContractError("frame row slice out of range");
    FeatureFrame out;
    out.names = frame.names;
    out.dates.assign(frame.dates.begin() + begin, frame.dates.begin() + end);
    for (const auto& col : frame.columns) out.columns.emplace_back(col.begin() + begin, col.begin() + end);
    return out;
}

std::vector<NamedScaler> fit_frame_scalers(const FeatureFrame& frame, std::size_t fit_rows) {
    if (fit_rows == 0 || fit_rows > frame.rows()) throw ContractError("scaler fit range out of bounds");
    std::vector<NamedScaler> out;
    for (std::size_t c = 0; c < frame.columns.size(); ++c) {
        const auto& col = frame.columns[c];
        out.push_back({frame.names[c], fit_minmax(std::span<const double>(col.data(), fit_rows))});
    }
    return out;
}

FeatureFrame scale_frame(const FeatureFrame& frame, const std::vector<NamedScaler>& scalers) {
    FeatureFrame out;
    out.dates = frame.dates;
    for (std::size_t c = 0; c < frame.columns.size(); ++c) {
        out.add_column(frame.names[c], transform(frame.columns[c], scaler_for(scalers, frame.names[c])));
    }
    return out;
}

const ScalerParams& scaler_for(const std::vector<NamedScaler>& scalers, const std::string& column) {
    for (const auto& s : scalers) {
        if (s.column == column) return s.params;
    }
    throw ContractError("no scaler for column '" + column + "'");
}

WindowedDataset make_windows(const FeatureFrame& frame, std::size_t window_size,
                             const std::string& target_column) {
    if (window_size == 0) throw ConfigError("window size must be positive");
    if (frame.rows() <= window_size) {
        throw InsufficientDataError("frame has " + std::to_string(frame.rows()) + " rows; window " +
                                    std::to_string(window_size) + " needs at least " +
                                    std::to_string(window_size + 1));
    }
    const std::size_t target = column_index(frame, target_column);
    for (std::size_t c = 0; c < frame.columns.size(); ++c) {
        for (double v : frame.columns[c]) {
            if (std::isnan(v)) {
                throw DomainError("column '" + frame.names[c] + "' has undefined rows; drop them before windowing");
            }
        }
    }

    WindowedDataset ds;
    ds.window_size = window_size;
    ds.feature_names = frame.names;
    const std::size_t n = frame.rows() - window_size;
    const std::size_t f = frame.columns.size();
    ds.X.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Matrix w(window_size, f);
        for (std::size_t t = 0; t < window_size; ++t) {
            for (std::size_t c = 0; c < f; ++c) w(t, c) = frame.columns[c][i + t];
        }
        ds.X.push_back(std::move(w));
        ds.y.push_back(frame.columns[target][i + window_size]);
        ds.target_dates.push_back(frame.dates[i + window_size]);
    }
    return ds;
}

void write_frame_csv(std::ostream& out, const FeatureFrame& frame) {
    out << "Date";
    for (const auto& name : frame.names) out << ',' << name;
    out << '\n';
    for (std::size_t r = 0; r < frame.rows(); ++r) {
        out << format_date(frame.dates[r]);
        for (const auto& col : frame.columns) {
            out << ',';
            if (!std::isnan(col[r])) out << format_double(col[r]);
        }
        out << '\n';
    }
}

FeatureFrame read_frame_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw EmptyInputError("empty feature frame input");
    ++line_no;
    const auto header = split_csv(trim(line));
    if (header.empty() || trim(header[0]) != "Date") throw SchemaError("frame CSV must start with a Date column");

    FeatureFrame frame;
    for (std::size_t i = 1; i < header.size(); ++i) {
        frame.names.emplace_back(trim(header[i]));
    }
    frame.columns.resize(frame.names.size());
    while (std::getline(in, line)) {
        ++line_no;
        const auto row = trim(line);
        if (row.empty()) continue;
        const auto fields = split_csv(row);
        if (fields.size() != header.size()) throw ParseError(line_no, "field count does not match header");
        const auto date = parse_date(trim(fields[0]));
        if (!date) throw ParseError(line_no, "unparseable date '" + std::string(fields[0]) + "'");
        if (!frame.dates.empty() && !(frame.dates.back() < *date)) {
            throw ParseError(line_no, "frame dates must be strictly ascending");
        }
        frame.dates.push_back(*date);
        for (std::size_t c = 0; c < frame.names.size(); ++c) {
            const auto cell = trim(fields[c + 1]);
            if (cell.empty()) {
                frame.columns[c].push_back(kNaN);
                continue;
            }
            const auto v = parse_double(cell);
            if (!v) throw ParseError(line_no, "non-numeric value in column '" + frame.names[c] + "'");
            frame.columns[c].push_back(*v);
        }
    }
    return frame;
}

FeatureFrame load_frame_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open frame file '" + path + "'");
    try {
        return read_frame_csv(in);
    } catch (const ParseError& e) {
        throw e.with_file(path);
    }
}

void write_scalers_csv(std::ostream& out, const std::vector<NamedScaler>& scalers) {
    out << "column,x_min,x_max\n";
    for (const auto& s : scalers) {
        out << s.column << ',' << format_double(s.params.x_min) << ',' << format_double(s.params.x_max) << '\n';
    }
}

std::vector<NamedScaler> read_scalers_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line) || trim(line) != "column,x_min,x_max") {
        throw SchemaError("scaler file must start with 'column,x_min,x_max'");
    }
    std::vector<NamedScaler> out;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_csv(trim(line));
        const auto lo = fields.size() == 3 ? parse_double(fields[1]) : std::nullopt;
        const auto hi = fields.size() == 3 ? parse_double(fields[2]) : std::nullopt;
        if (!lo || !hi || *hi < *lo) throw ParseError(line_no, "malformed scaler row");
        out.push_back({std::string(trim(fields[0])), {*lo, *hi}});
    }
    return out;
}

} // namespace stockcast
