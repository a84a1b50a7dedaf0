#pragma once

#include <cstddef>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "stockcast/date.hpp"

namespace stockcast {

struct NewsItem {
    Date date{};
    std::string text;
    std::string source;
};

struct ScoredNews {
    Date date{};
    double score = 0.0;
};

// Token valences plus the negation and booster vocabularies used by score_text.
struct SentimentLexicon {
    std::unordered_map<std::string, double> valence;
    std::unordered_set<std::string> negators;
    std::unordered_map<std::string, double> boosters;
};

struct DailySentiment {
    std::vector<Date> dates;
    std::vector<double> score;
    std::vector<std::size_t> coverage;
};

// Normalization constant of the compound squash s / sqrt(s^2 + alpha).
inline constexpr double kCompoundAlpha = 15.0;
// Negators are looked for this many tokens before a lexicon hit.
inline constexpr std::size_t kNegationWindow = 3;

const SentimentLexicon& default_lexicon();

// `token<TAB>valence` lines; further tab-separated columns are ignored so a
// stock VADER lexicon file loads as-is. Negators and boosters come from the
// bundled defaults.
SentimentLexicon read_lexicon(std::istream& in);
SentimentLexicon load_lexicon(const std::string& path);

std::vector<std::string> tokenize(std::string_view text);

double compound_squash(double summed_valence);

// Sum of per-token valences after booster and negation adjustment.
double summed_valence(std::string_view text, const SentimentLexicon& lexicon);

double score_text(std::string_view text, const SentimentLexicon& lexicon);

// One JSON object per line: {"date": "YYYY-MM-DD", "text": "...", "source": "..."}.
std::vector<NewsItem> read_news_jsonl(std::istream& in);
std::vector<NewsItem> load_news_jsonl(const std::string& path);

std::vector<ScoredNews> score_news(std::span<const NewsItem> items, const SentimentLexicon& lexicon);

// Mean score per trading day. News dated on a non-trading day counts toward
// the next trading day; news after the last calendar day is ignored. Days
// without news repeat the previous day's score (0 before any news).
DailySentiment aggregate_daily(std::span<const ScoredNews> items, std::span<const Date> calendar);

std::vector<double> normalize_sentiment(const DailySentiment& daily);

} // namespace stockcast
