#include "stockcast/sentiment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>

#include "json.hpp"
#include "stockcast/errors.hpp"
#include "stockcast/features.hpp"
#include "stockcast/text.hpp"

namespace stockcast {

SentimentLexicon read_lexicon(std::istream& in) {
    SentimentLexicon lexicon;
    lexicon.negators = default_lexicon().negators;
    lexicon.boosters = default_lexicon().boosters;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto row = trim(line);
        if (row.empty() || row.front() == '#') continue;
        const auto tab = row.find('\t');
        if (tab == std::string_view::npos) throw ParseError(line_no, "expected token<TAB>valence");
        std::string token(trim(row.substr(0, tab)));
        std::transform(token.begin(), token.end(), token.begin(),
                       [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
        auto rest = row.substr(tab + 1);
        rest = rest.substr(0, rest.find('\t'));
        const auto value = parse_double(rest);
        if (token.empty() || !value || !std::isfinite(*value)) throw ParseError(line_no, "malformed lexicon entry");
        if (!lexicon.valence.emplace(token, *value).second) {
            throw ParseError(line_no, "duplicate lexicon token '" + token + "'");
        }
    }
    return lexicon;
}

SentimentLexicon load_lexicon(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open lexicon file '" + path + "'");
    try {
        return read_lexicon(in);
    } catch (const ParseError& e) {
        throw e.with_file(path);
    }
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char raw : text) {
        const auto ch = static_cast<unsigned char>(raw);
        if (std::isalnum(ch) || ch == '\'' || ch >= 0x80) {
            current.push_back(static_cast<char>(std::tolower(ch)));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    for (auto& tok : tokens) {
        // Quote marks around a word are punctuation, not part of it.
        while (!tok.empty() && tok.front() == '\'') tok.erase(tok.begin());
        while (!tok.empty() && tok.back() == '\'') tok.pop_back();
    }
    std::erase_if(tokens, [](const std::string& t) { return t.empty(); });
    return tokens;
}

double compound_squash(double summed_valence) {
    return summed_valence / std::sqrt(summed_valence * summed_valence + kCompoundAlpha);
}

double summed_valence(std::string_view text, const SentimentLexicon& lexicon) {
    const auto tokens = tokenize(text);
    double sum = 0.0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const auto hit = lexicon.valence.find(tokens[i]);
        if (hit == lexicon.valence.end()) continue;
        double v = hit->second;
        if (i > 0) {
            const auto boost = lexicon.boosters.find(tokens[i - 1]);
            if (boost != lexicon.boosters.end() && v != 0.0) v += v > 0 ? boost->second : -boost->second;
        }
        const std::size_t from = i >= kNegationWindow ? i - kNegationWindow : 0;
        for (std::size_t j = from; j < i; ++j) {
            if (lexicon.negators.contains(tokens[j])) {
                v = -v;
                break;
            }
        }
        sum += v;
    }
    return sum;
}

double score_text(std::string_view text, const SentimentLexicon& lexicon) {
    return compound_squash(summed_valence(text, lexicon));
}

std::vector<NewsItem> read_news_jsonl(std::istream& in) {
    std::vector<NewsItem> items;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(line_no, std::string("invalid JSON: ") + e.what());
        }
        if (!obj.is_object() || !obj.contains("date") || !obj["date"].is_string() || !obj.contains("text") ||
            !obj["text"].is_string()) {
            throw ParseError(line_no, "news record needs string fields 'date' and 'text'");
        }
        const auto date = parse_date(obj["date"].get<std::string>());
        if (!date) throw ParseError(line_no, "unparseable date");
        NewsItem item;
        item.date = *date;
        item.text = obj["text"].get<std::string>();
        if (trim(item.text).empty()) throw ParseError(line_no, "news text is empty");
        if (obj.contains("source") && obj["source"].is_string()) item.source = obj["source"].get<std::string>();
        items.push_back(std::move(item));
    }
    return items;
}

std::vector<NewsItem> load_news_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open news file '" + path + "'");
    try {
        return read_news_jsonl(in);
    } catch (const ParseError& e) {
        throw e.with_file(path);
    }
}

std::vector<ScoredNews> score_news(std::span<const NewsItem> items, const SentimentLexicon& lexicon) {
    std::vector<ScoredNews> out;
    out.reserve(items.size());
    for (const auto& item : items) out.push_back({item.date, score_text(item.text, lexicon)});
    return out;
}

DailySentiment aggregate_daily(std::span<const ScoredNews> items, std::span<const Date> calendar) {
    if (calendar.empty()) throw ContractError("sentiment calendar is empty");
    if (std::adjacent_find(calendar.begin(), calendar.end(), std::greater_equal<>()) != calendar.end()) {
        throw ContractError("sentiment calendar must be strictly ascending");
    }
    std::vector<double> sum(calendar.size(), 0.0);
    DailySentiment daily;
    daily.dates.assign(calendar.begin(), calendar.end());
    daily.coverage.assign(calendar.size(), 0);
    for (const auto& item : items) {
        const auto it = std::lower_bound(calendar.begin(), calendar.end(), item.date);
        if (it == calendar.end()) continue;
        const auto idx = static_cast<std::size_t>(it - calendar.begin());
        sum[idx] += item.score;
        ++daily.coverage[idx];
    }
    daily.score.resize(calendar.size());
    double carry = 0.0;
    for (std::size_t i = 0; i < calendar.size(); ++i) {
        if (daily.coverage[i] > 0) carry = sum[i] / static_cast<double>(daily.coverage[i]);
        daily.score[i] = carry;
    }
    return daily;
}

std::vector<double> normalize_sentiment(const DailySentiment& daily) {
    if (daily.score.empty()) return {};
    return transform(daily.score, fit_minmax(daily.score));
}

} // namespace stockcast
