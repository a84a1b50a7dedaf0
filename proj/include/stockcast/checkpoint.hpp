#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "stockcast/features.hpp"
#include "stockcast/neural.hpp"
#include "stockcast/training.hpp"

namespace stockcast {

enum class ModelKind { Lstm, Identity };

// Everything needed to resume training or reproduce predictions.
struct Checkpoint {
    ModelKind kind = ModelKind::Lstm;
    LstmNetwork network;
    AdamState optimizer;
    std::uint64_t seed = 0;
    std::string target_column = "close";
    std::vector<std::string> feature_columns;
    std::vector<NamedScaler> scalers;
    double split_ratio = 0.8;
};

// Line-oriented text: `key value...` records, and `tensor <name> <rows>x<cols> v...`
// for arrays. Doubles use the shortest decimal form that round-trips exactly.
void write_checkpoint(std::ostream& out, const Checkpoint& checkpoint);
Checkpoint read_checkpoint(std::istream& in);

void save_checkpoint(const std::string& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::string& path);

} // namespace stockcast
