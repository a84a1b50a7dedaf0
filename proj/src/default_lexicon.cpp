#include "stockcast/sentiment.hpp"

#include <utility>

namespace stockcast {

namespace {

// Finance-leaning valences on the [-4, 4] scale of the VADER lexicon.
constexpr std::pair<const char*, double> kValences[] = {
    {"good", 1.9},        {"great", 3.1},       {"excellent", 2.7},   {"strong", 2.3},
    {"stronger", 2.1},    {"strongest", 2.5},   {"gain", 2.0},        {"gains", 2.0},
    {"gained", 1.8},      {"profit", 2.1},      {"profits", 2.1},     {"profitable", 2.2},
    {"growth", 2.0},      {"grow", 1.6},        {"grows", 1.6},       {"growing", 1.6},
    {"rise", 1.4},        {"rises", 1.4},       {"rising", 1.4},      {"rose", 1.3},
    {"rally", 2.0},       {"rallies", 2.0},     {"surge", 2.1},       {"surges", 2.1},
    {"surged", 2.0},      {"soar", 2.4},        {"soars", 2.4},       {"soared", 2.3},
    {"jump", 1.3},        {"jumps", 1.3},       {"boost", 1.7},       {"boosts", 1.7},
    {"beat", 1.5},        {"beats", 1.5},       {"record", 1.2},      {"upgrade", 1.9},
    {"upgraded", 1.9},    {"outperform", 2.0},  {"outperforms", 2.0}, {"bullish", 2.4},
    {"optimistic", 2.0},  {"optimism", 2.0},    {"positive", 2.6},    {"robust", 1.8},
    {"success", 2.7},     {"successful", 2.8},  {"win", 2.8},         {"wins", 2.7},
    {"innovative", 2.0},  {"innovation", 1.8},  {"recovery", 1.6},    {"recover", 1.5},
    {"confident", 2.2},   {"confidence", 2.3},  {"exceed", 1.6},      {"exceeds", 1.6},
    {"exceeded", 1.6},    {"dividend", 1.0},    {"stable", 1.2},      {"improve", 1.9},
    {"improved", 2.1},    {"improvement", 2.0}, {"bad", -2.5},        {"poor", -2.1},
    {"weak", -1.9},       {"weaker", -1.9},     {"weakness", -1.8},   {"loss", -1.3},
    {"losses", -1.7},     {"lose", -1.7},       {"lost", -1.3},       {"fall", -1.4},
    {"falls", -1.4},      {"fell", -1.4},       {"falling", -1.4},    {"drop", -1.1},
    {"drops", -1.1},      {"dropped", -1.2},    {"decline", -1.5},    {"declines", -1.5},
    {"declined", -1.5},   {"plunge", -2.4},     {"plunges", -2.4},    {"plunged", -2.4},
    {"slump", -2.1},      {"slumps", -2.1},     {"crash", -2.7},      {"crashes", -2.7},
    {"tumble", -1.9},     {"tumbles", -1.9},    {"miss", -1.2},       {"misses", -1.2},
    {"downgrade", -1.9},  {"downgraded", -1.9}, {"underperform", -1.9}, {"bearish", -2.4},
    {"pessimistic", -1.9}, {"negative", -2.7},  {"risk", -1.1},       {"risks", -1.1},
    {"risky", -1.4},      {"fear", -2.2},       {"fears", -2.2},      {"concern", -1.4},
    {"concerns", -1.4},   {"worry", -1.9},      {"worries", -1.9},    {"uncertain", -1.2},
    {"uncertainty", -1.4}, {"volatile", -1.3},  {"lawsuit", -1.8},    {"fraud", -3.0},
    {"scandal", -2.7},    {"bankruptcy", -3.1}, {"recession", -2.5},  {"layoffs", -2.2},
    {"cut", -1.1},        {"cuts", -1.1},       {"fine", 0.8},        {"fined", -1.6},
    {"warning", -1.4},    {"warns", -1.4},      {"failure", -2.6},    {"fail", -2.5},
    {"fails", -2.5},      {"selloff", -2.0},    {"inflation", -1.0},  {"debt", -1.5},
};

constexpr const char* kNegators[] = {
    "not",    "no",     "never",   "none",    "nobody",   "nothing", "neither", "nor",
    "cannot", "without", "hardly", "rarely",  "don't",    "doesn't", "didn't",  "isn't",
    "aren't", "wasn't", "weren't", "won't",   "wouldn't", "can't",   "couldn't", "shouldn't",
    "hasn't", "haven't", "hadn't", "dont",    "doesnt",   "didnt",   "isnt",    "wont",
};

// Additive intensity; positive values amplify, negative values dampen.
constexpr double kBoostIncrement = 0.293;
constexpr std::pair<const char*, double> kBoosters[] = {
    {"very", kBoostIncrement},          {"extremely", kBoostIncrement},    {"highly", kBoostIncrement},
    {"strongly", kBoostIncrement},      {"significantly", kBoostIncrement}, {"sharply", kBoostIncrement},
    {"hugely", kBoostIncrement},        {"remarkably", kBoostIncrement},   {"substantially", kBoostIncrement},
    {"really", kBoostIncrement},        {"slightly", -kBoostIncrement},    {"somewhat", -kBoostIncrement},
    {"barely", -kBoostIncrement},       {"marginally", -kBoostIncrement},  {"modestly", -kBoostIncrement},
    {"partly", -kBoostIncrement},
};

SentimentLexicon build_default() {
    SentimentLexicon lex;
    for (const auto& [token, value] : kValences) lex.valence.emplace(token, value);
    for (const char* token : kNegators) lex.negators.emplace(token);
    for (const auto& [token, value] : kBoosters) lex.boosters.emplace(token, value);
    return lex;
}

} // namespace

const SentimentLexicon& default_lexicon() {
    static const SentimentLexicon lexicon = build_default();
    return lexicon;
}

} // namespace stockcast
