#include "reviewlens/sentiment.hpp"

#include <cmath>

#include "reviewlens/error.hpp"
#include "reviewlens/json.hpp"
#include "reviewlens/text.hpp"

namespace reviewlens {

void SentimentConfig::validate() const {
    if (!(delta_p > 0.0 && delta_p <= 1.0)) {
        throw ValidationError("sentiment.delta_p", "must be in (0, 1], got " + std::to_string(delta_p));
    }
}

Polarity decide_polarity(SentimentScores s, const SentimentConfig& cfg) noexcept {
    if (s.p < cfg.delta_p && s.n < cfg.delta_p) return Polarity::Neutral;
    return s.p > s.n ? Polarity::Positive : Polarity::Negative;
}

Segment classify_segment(Segment s, const SentimentClassifier& clf, const SentimentConfig& cfg) {
    SentimentScores scores;
    try {
        scores = clf.score(s.text);
    } catch (const std::exception& e) {
        throw DataError("sentiment failed for segment " + s.review_id + "[" + std::to_string(s.span.start) +
                        "," + std::to_string(s.span.end) + "): " + e.what());
    }
    s.pos_score = scores.p;
    s.neg_score = scores.n;
    s.polarity = decide_polarity(scores, cfg);
    return s;
}

LexiconClassifier::LexiconClassifier(std::unordered_map<std::string, double> weights, double gain)
    : weights_(std::move(weights)), gain_(gain) {
    if (!(gain_ > 0.0)) throw ValidationError("sentiment.lexicon_gain", "must be positive");
    for (const auto& [token, w] : weights_) {
        if (!(w >= -1.0 && w <= 1.0)) throw DataError("lexicon weight for '" + token + "' outside [-1, 1]");
    }
}

SentimentScores LexiconClassifier::score(std::string_view input) const {
    double pos = 0.0;
    double neg = 0.0;
    bool negate = false;
    for (const auto& tok : text::tokens(input)) {
        if (tok == "not" || tok == "no" || tok == "never") {
            negate = true;
            continue;
        }
        const auto it = weights_.find(tok);
        if (it == weights_.end() || it->second == 0.0) continue;
        const double w = negate ? -it->second : it->second;
        negate = false;
        if (w > 0.0) {
            pos += w;
        } else {
            neg -= w;
        }
    }
    return {1.0 - std::exp(-gain_ * pos), 1.0 - std::exp(-gain_ * neg)};
}

PrecomputedScoresClassifier::PrecomputedScoresClassifier(std::unordered_map<std::string, SentimentScores> table)
    : table_(std::move(table)) {}

SentimentScores PrecomputedScoresClassifier::score(std::string_view input) const {
    const auto it = table_.find(std::string(text::trim(input)));
    if (it == table_.end()) throw DataError("no precomputed sentiment for '" + std::string(input) + "'");
    return it->second;
}

std::unique_ptr<SentimentClassifier> lexicon_classifier(const std::filesystem::path& lexicon_path, double gain) {
    std::unordered_map<std::string, double> weights;
    io::for_each_jsonl(lexicon_path, [&](const Json& row, std::size_t) {
        const auto& token = row.at("token");
        const auto& weight = row.at("weight");
        if (!token.is_string() || !weight.is_number()) throw DataError("expected {\"token\": str, \"weight\": float}");
        weights.insert_or_assign(text::lower(token.get<std::string>()), weight.get<double>());
    });
    return std::make_unique<LexiconClassifier>(std::move(weights), gain);
}

std::unique_ptr<SentimentClassifier> load_scores_classifier(const std::filesystem::path& scores_path) {
    std::unordered_map<std::string, SentimentScores> table;
    io::for_each_jsonl(scores_path, [&](const Json& row, std::size_t) {
        const auto& text = row.at("text");
        const auto& p = row.at("p");
        const auto& n = row.at("n");
        if (!text.is_string() || !p.is_number() || !n.is_number()) {
            throw DataError("expected {\"text\": str, \"p\": float, \"n\": float}");
        }
        const SentimentScores s{p.get<double>(), n.get<double>()};
        if (!(s.p >= 0.0 && s.p <= 1.0 && s.n >= 0.0 && s.n <= 1.0)) throw DataError("scores must lie in [0, 1]");
        table.insert_or_assign(std::string(text::trim(text.get<std::string>())), s);
    });
    return std::make_unique<PrecomputedScoresClassifier>(std::move(table));
}

}  // namespace reviewlens
