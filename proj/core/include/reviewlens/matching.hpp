#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "reviewlens/embedding.hpp"
#include "reviewlens/model.hpp"

namespace reviewlens {

struct MatchConfig {
    std::size_t k = 5;        // keywords averaged by the top-k signal
    double delta_h = 0.8;     // high-confidence threshold
    double delta_m = 0.3;     // majority-vote threshold (pair sum >= 2 * delta_m)
    double delta_avg = 0.5;   // best-average threshold

    void validate() const;
};

/// Leading topic of one signal. `topic` points into the taxonomy the signal
/// was computed from.
struct SignalResult {
    const GranularTopic* topic = nullptr;
    double score = 0.0;
};

enum class MatchRule {
    HighConfTkw,
    HighConfN,
    HighConfMkw,
    MajorityTkwN,
    MajorityMkwTkw,
    MajorityNMkw,
    BestAverage,
    NoMatch,
};

std::string_view to_string(MatchRule r) noexcept;

struct SignalSet {
    SignalResult name;   // closest topic name
    SignalResult topk;   // best mean of the k closest keywords
    SignalResult mean;   // best mean over all keywords
    SignalResult avg;    // best mean of the three per-topic scores
};

struct MatchOutcome {
    const GranularTopic* matched = nullptr;  // null iff rule == NoMatch
    MatchRule rule = MatchRule::NoMatch;
    SignalSet signals;
};

/// (topics[argmax], max); ties go to the lowest index.
/// Throws DataError on empty input or length mismatch.
SignalResult best_topic_and_score(std::span<const GranularTopic* const> topics, std::span<const double> scores);

/// L3 topics of the given polarity, in taxonomy order.
std::vector<const GranularTopic*> candidate_topics(const Taxonomy& t, Polarity polarity);

SignalResult signal_name(const Segment& seg, std::span<const GranularTopic* const> topics, const Similarity& sim);
SignalResult signal_topk_keywords(const Segment& seg, std::span<const GranularTopic* const> topics,
                                  const Similarity& sim, std::size_t k);
SignalResult signal_mean_keywords(const Segment& seg, std::span<const GranularTopic* const> topics,
                                  const Similarity& sim);

/// Applies the rule cascade to precomputed signals. Rules are tried in order:
/// three high-confidence checks, three pairwise majority checks, best average.
MatchOutcome resolve_cascade(const SignalSet& signals, const MatchConfig& cfg);

/// Three-signal topic matching against the taxonomy topics sharing the
/// segment's polarity. The segment must be Positive or Negative and the
/// taxonomy must hold at least one such topic.
MatchOutcome match_topic(const Segment& seg, const Taxonomy& taxonomy, const MatchConfig& cfg, const Similarity& sim);

/// Reusable matcher holding per-polarity candidate lists for one taxonomy.
class TopicMatcher {
public:
    TopicMatcher(const Taxonomy& taxonomy, MatchConfig cfg, Similarity sim);

    /// NoMatch when the taxonomy has no topic of the segment's polarity.
    MatchOutcome match(const Segment& seg) const;
    const MatchConfig& config() const noexcept { return cfg_; }

private:
    std::vector<const GranularTopic*> positive_;
    std::vector<const GranularTopic*> negative_;
    MatchConfig cfg_;
    Similarity sim_;
};

}  // namespace reviewlens
