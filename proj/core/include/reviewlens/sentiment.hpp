#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>

#include "reviewlens/model.hpp"

namespace reviewlens {

/// Independent positive and negative head outputs, each in [0, 1]. They need
/// not sum to one.
struct SentimentScores {
    double p = 0.0;
    double n = 0.0;
};

class SentimentClassifier {
public:
    virtual ~SentimentClassifier() = default;
    virtual SentimentScores score(std::string_view text) const = 0;
};

struct SentimentConfig {
    double delta_p = 0.7;

    void validate() const;
};

/// Neutral iff both heads are below delta_p; otherwise the larger head wins,
/// and an exact tie resolves to Negative.
Polarity decide_polarity(SentimentScores s, const SentimentConfig& cfg) noexcept;

/// Returns `s` with scores and polarity filled in. Classifier failures are
/// rethrown as DataError carrying the segment's review id and span.
Segment classify_segment(Segment s, const SentimentClassifier& clf, const SentimentConfig& cfg);

/// Token-weight lexicon: p = 1 - exp(-gain * sum of positive weights),
/// n = 1 - exp(-gain * sum of |negative| weights). "not", "no" and "never"
/// flip the sign of the next sentiment-bearing token.
class LexiconClassifier final : public SentimentClassifier {
public:
    explicit LexiconClassifier(std::unordered_map<std::string, double> weights, double gain = 1.0);

    SentimentScores score(std::string_view text) const override;

private:
    std::unordered_map<std::string, double> weights_;
    double gain_;
};

/// Replays scores from an external classifier (JSON Lines {"text","p","n"}).
class PrecomputedScoresClassifier final : public SentimentClassifier {
public:
    explicit PrecomputedScoresClassifier(std::unordered_map<std::string, SentimentScores> table);

    SentimentScores score(std::string_view text) const override;

private:
    std::unordered_map<std::string, SentimentScores> table_;
};

/// Lexicon file: JSON Lines {"token": str, "weight": float in [-1, 1]}.
std::unique_ptr<SentimentClassifier> lexicon_classifier(const std::filesystem::path& lexicon_path,
                                                        double gain = 1.0);
std::unique_ptr<SentimentClassifier> load_scores_classifier(const std::filesystem::path& scores_path);

}  // namespace reviewlens
