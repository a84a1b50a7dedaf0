#include "stockcast/checkpoint.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "stockcast/errors.hpp"
#include "stockcast/text.hpp"

namespace stockcast {

namespace {

constexpr const char* kMagic = "stockcast-checkpoint 1";

struct TensorRecord {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;
};

void write_tensor(std::ostream& out, const std::string& name, std::size_t rows, std::size_t cols,
                  std::span<const double> values) {
    out << "tensor " << name << ' ' << rows << 'x' << cols;
    for (double v : values) out << ' ' << format_double(v);
    out << '\n';
}

std::pair<std::size_t, std::size_t> tensor_shape(const LstmNetwork& net, std::size_t index) {
    const std::size_t per_layer = 3;
    if (index < net.layers.size() * per_layer) {
        const auto& layer = net.layers[index / per_layer];
        const std::size_t rows = kGateCount * layer.hidden_size;
        switch (index % per_layer) {
        case 0: return {rows, layer.input_size};
        case 1: return {rows, layer.hidden_size};
        default: return {rows, 1};
        }
    }
    if (index == net.layers.size() * per_layer) return {1, net.head.weights.size()};
    return {1, 1};
}

const char* kind_name(ModelKind kind) { return kind == ModelKind::Lstm ? "lstm" : "identity"; }

} // namespace

void write_checkpoint(std::ostream& out, const Checkpoint& ck) {
    const auto& cfg = ck.network.config;
    out << kMagic << '\n';
    out << "model " << kind_name(ck.kind) << '\n';
    out << "seed " << ck.seed << '\n';
    out << "config.window_size " << cfg.window_size << '\n';
    out << "config.n_features " << cfg.n_features << '\n';
    out << "config.layer_sizes";
    for (auto s : cfg.layer_sizes) out << ' ' << s;
    out << '\n';
    out << "config.dropout_rate " << format_double(cfg.dropout_rate) << '\n';
    out << "config.seed " << cfg.seed << '\n';
    out << "config.head " << (cfg.head == HeadActivation::Linear ? "linear" : "sigmoid") << '\n';
    out << "data.target " << ck.target_column << '\n';
    out << "data.features";
    for (const auto& f : ck.feature_columns) out << ' ' << f;
    out << '\n';
    out << "data.split_ratio " << format_double(ck.split_ratio) << '\n';
    for (const auto& s : ck.scalers) {
        out << "scaler " << s.column << ' ' << format_double(s.params.x_min) << ' ' << format_double(s.params.x_max)
            << '\n';
    }

    const auto names = parameter_names(ck.network);
    const auto tensors = parameter_tensors(ck.network);
    for (std::size_t k = 0; k < tensors.size(); ++k) {
        const auto [rows, cols] = tensor_shape(ck.network, k);
        write_tensor(out, names[k], rows, cols, tensors[k]);
    }
    out << "adam.t " << ck.optimizer.t << '\n';
    for (std::size_t k = 0; k < ck.optimizer.m.size() && k < names.size(); ++k) {
        const auto [rows, cols] = tensor_shape(ck.network, k);
        write_tensor(out, "adam.m." + names[k], rows, cols, ck.optimizer.m[k]);
        write_tensor(out, "adam.v." + names[k], rows, cols, ck.optimizer.v[k]);
    }
    out << "end\n";
}

Checkpoint read_checkpoint(std::istream& in) {
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line) || trim(line) != kMagic) throw SchemaError("not a stockcast checkpoint");

    Checkpoint ck;
    NetworkConfig cfg;
    std::map<std::string, TensorRecord> tensors;
    bool ended = false;
    bool have_t = false;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream row{std::string(trim(line))};
        std::string key;
        if (!(row >> key)) continue;
        if (key == "end") {
            ended = true;
            break;
        }
        const auto fail = [&](const std::string& what) { throw ParseError(line_no, what); };
        const auto read_number = [&](auto& dest) {
            if (!(row >> dest)) fail("bad value for " + key);
        };
        const auto read_double = [&]() {
            std::string tok;
            if (!(row >> tok)) fail("missing value for " + key);
            const auto v = parse_double(tok);
            if (!v) fail("bad number '" + tok + "'");
            return *v;
        };

        if (key == "model") {
            std::string kind;
            row >> kind;
            if (kind == "lstm") {
                ck.kind = ModelKind::Lstm;
            } else if (kind == "identity") {
                ck.kind = ModelKind::Identity;
            } else {
                fail("unknown model kind '" + kind + "'");
            }
        } else if (key == "seed") {
            read_number(ck.seed);
        } else if (key == "config.window_size") {
            read_number(cfg.window_size);
        } else if (key == "config.n_features") {
            read_number(cfg.n_features);
        } else if (key == "config.layer_sizes") {
            cfg.layer_sizes.clear();
            std::size_t s = 0;
            while (row >> s) cfg.layer_sizes.push_back(s);
        } else if (key == "config.dropout_rate") {
            cfg.dropout_rate = read_double();
        } else if (key == "config.seed") {
            read_number(cfg.seed);
        } else if (key == "config.head") {
            std::string head;
            row >> head;
            if (head == "linear") {
                cfg.head = HeadActivation::Linear;
            } else if (head == "sigmoid") {
                cfg.head = HeadActivation::Sigmoid;
            } else {
                fail("unknown head activation '" + head + "'");
            }
        } else if (key == "data.target") {
            row >> ck.target_column;
        } else if (key == "data.features") {
            std::string f;
            while (row >> f) ck.feature_columns.push_back(f);
        } else if (key == "data.split_ratio") {
            ck.split_ratio = read_double();
        } else if (key == "scaler") {
            NamedScaler s;
            if (!(row >> s.column)) fail("scaler needs a column name");
            s.params.x_min = read_double();
            s.params.x_max = read_double();
            ck.scalers.push_back(s);
        } else if (key == "adam.t") {
            read_number(ck.optimizer.t);
            have_t = true;
        } else if (key == "tensor") {
            std::string name, shape;
            if (!(row >> name >> shape)) fail("tensor record needs a name and shape");
            const auto x = shape.find('x');
            TensorRecord rec;
            try {
                if (x == std::string::npos) throw std::invalid_argument("shape");
                rec.rows = std::stoul(shape.substr(0, x));
                rec.cols = std::stoul(shape.substr(x + 1));
            } catch (const std::exception&) {
                fail("bad tensor shape '" + shape + "'");
            }
            rec.values.reserve(rec.rows * rec.cols);
            std::string tok;
            while (row >> tok) {
                const auto v = parse_double(tok);
                if (!v) fail("bad number '" + tok + "' in tensor " + name);
                rec.values.push_back(*v);
            }
            if (rec.values.size() != rec.rows * rec.cols) fail("tensor " + name + " has the wrong element count");
            if (!tensors.emplace(name, std::move(rec)).second) fail("duplicate tensor " + name);
        } else {
            fail("unknown checkpoint key '" + key + "'");
        }
    }
    if (!ended) throw SchemaError("checkpoint is truncated (no 'end' record)");

    ck.network = zero_network(cfg);
    const auto names = parameter_names(ck.network);
    auto params = parameter_tensors(ck.network);
    ck.optimizer.m.clear();
    ck.optimizer.v.clear();
    const bool have_adam = tensors.contains("adam.m." + names.front());
    for (std::size_t k = 0; k < names.size(); ++k) {
        const auto [rows, cols] = tensor_shape(ck.network, k);
        const auto load = [&](const std::string& name) -> const std::vector<double>& {
            const auto it = tensors.find(name);
            if (it == tensors.end()) throw SchemaError("checkpoint is missing tensor " + name);
            if (it->second.rows != rows || it->second.cols != cols) {
                throw ShapeError("tensor " + name + " shape does not match the stored configuration");
            }
            return it->second.values;
        };
        const auto& values = load(names[k]);
        std::copy(values.begin(), values.end(), params[k].begin());
        if (have_adam) {
            ck.optimizer.m.push_back(load("adam.m." + names[k]));
            ck.optimizer.v.push_back(load("adam.v." + names[k]));
        }
    }
    if (!have_adam) ck.optimizer = AdamState::for_network(ck.network);
    if (!have_t) ck.optimizer.t = 0;
    if (ck.feature_columns.size() != cfg.n_features) {
        throw ShapeError("checkpoint lists " + std::to_string(ck.feature_columns.size()) + " features but the network takes " +
                         std::to_string(cfg.n_features));
    }
    return ck;
}

void save_checkpoint(const std::string& path, const Checkpoint& checkpoint) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write checkpoint '" + path + "'");
    write_checkpoint(out, checkpoint);
    if (!out) throw Error("failed writing checkpoint '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open checkpoint '" + path + "'");
    try {
        return read_checkpoint(in);
    } catch (const ParseError& e) {
        throw e.with_file(path);
    }
}

} // namespace stockcast
