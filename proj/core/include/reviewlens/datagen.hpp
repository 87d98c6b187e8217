#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "reviewlens/embedding.hpp"
#include "reviewlens/json.hpp"
#include "reviewlens/matching.hpp"
#include "reviewlens/model.hpp"
#include "reviewlens/segmentation.hpp"
#include "reviewlens/sentiment.hpp"

namespace reviewlens {

/// A question template with {review}, {topic} and {polarity} slots.
class PromptTemplate {
public:
    /// `required` lists the slots that must each appear exactly once.
    PromptTemplate(std::string source, std::vector<std::string> required, std::string field = "templates");

    std::string render(const std::map<std::string, std::string, std::less<>>& values) const;
    /// Recovers slot values from a rendered prompt, or nullopt if `prompt`
    /// was not produced by this template.
    std::optional<std::map<std::string, std::string, std::less<>>> match(std::string_view prompt) const;

    const std::string& source() const noexcept { return source_; }

private:
    struct Part {
        bool slot;
        std::string text;  // literal text, or slot name
    };
    std::string source_;
    std::vector<Part> parts_;
};

/// Decomposed-prompt questions. Each renders as "question : review".
struct PromptTemplates {
    std::string topic_q = "identify the topics discussed in the review : {review}";
    std::string polarity_q = "identify the polarity of the topic [{topic}] in the review : {review}";
    std::string verbatim_q =
        "extract the verbatims for the topic [{topic}] with polarity [{polarity}] from the review : {review}";

    /// Throws ValidationError when a required slot is missing or repeated.
    void validate() const;

    std::string topic_prompt(std::string_view review) const;
    std::string polarity_prompt(std::string_view review, std::string_view topic) const;
    std::string verbatim_prompt(std::string_view review, std::string_view topic, Polarity polarity) const;
};

enum class Phase { Topic, Polarity, Verbatim };

std::string_view to_string(Phase p) noexcept;

struct TrainingPair {
    std::string prompt;
    std::string target;
    Phase phase = Phase::Topic;
    std::string review_id;

    bool operator==(const TrainingPair&) const = default;
};

void to_json(Json& j, const TrainingPair& p);

// Canonical target strings.
/// "[a, b, c]"; "[]" when empty.
std::string format_topic_list(const std::vector<std::string>& topics);
/// Verbatims joined by " | ".
std::string format_verbatims(const std::vector<std::string>& verbatims);
inline constexpr std::string_view kVerbatimSeparator = " | ";

struct SegmentNetStats {
    std::size_t reviews = 0;
    std::size_t segments = 0;
    std::size_t neutral_dropped = 0;
    std::size_t no_match_dropped = 0;
    std::size_t insights = 0;

    SegmentNetStats& operator+=(const SegmentNetStats& o) noexcept;
};

/// Heuristic labeller: segment, classify, drop neutral, match, drop
/// unmatched, then group segments into review-level insights.
class SegmentNet {
public:
    /// Throws ValidationError if the taxonomy or any config is invalid.
    SegmentNet(const Taxonomy& taxonomy, SegmenterConfig seg_cfg, SentimentConfig sent_cfg, MatchConfig match_cfg,
               const SentimentClassifier& classifier, Similarity sim);

    /// Insights are grouped by topic in order of first occurrence; verbatims
    /// keep source order. Reviews without insights yield an empty list.
    LabelledRecord label(const Review& review, SegmentNetStats* stats = nullptr) const;

    /// Segments with polarity set, neutral ones included.
    std::vector<Segment> classify(const Review& review) const;

    const Taxonomy& taxonomy() const noexcept { return *taxonomy_; }

private:
    const Taxonomy* taxonomy_;
    SegmenterConfig seg_cfg_;
    SentimentConfig sent_cfg_;
    const SentimentClassifier* classifier_;
    TopicMatcher matcher_;
};

/// Labels every review; `jobs` workers, output in input order.
std::vector<LabelledRecord> generate_labelled(std::span<const Review> reviews, const SegmentNet& net,
                                              std::size_t jobs = 1, SegmentNetStats* stats = nullptr);

/// 1 topic-list pair, then one polarity pair and one verbatim pair per
/// insight: 2N + 1 pairs, or a single "[]" pair when N = 0.
std::vector<TrainingPair> serialize_training_pairs(const LabelledRecord& rec, const PromptTemplates& tpl);

/// Sentence-shuffled copies of a record with unchanged labels. The review is
/// split on '.', and up to min(max_variants, n! - 1) distinct non-identity
/// orderings are emitted, joined by ". ". Deterministic for a given seed.
std::vector<LabelledRecord> shuffle_augment(const LabelledRecord& rec, std::size_t max_variants,
                                            std::uint64_t seed);

}  // namespace reviewlens
