#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace reviewlens {

enum class Polarity { Positive, Negative, Neutral };

std::string_view to_string(Polarity p) noexcept;
/// Accepts "positive", "negative", "neutral" (case-insensitive). Throws DataError.
Polarity parse_polarity(std::string_view s);

struct Review {
    std::string id;
    std::string text;
    std::optional<std::string> category;

    bool operator==(const Review&) const = default;
};

/// Half-open byte range into the source review text.
struct CharSpan {
    std::size_t start = 0;
    std::size_t end = 0;

    std::size_t size() const noexcept { return end - start; }
    bool operator==(const CharSpan&) const = default;
};

struct Segment {
    std::string review_id;
    std::string text;
    CharSpan span;
    std::optional<Polarity> polarity;  // unset until classified
    double pos_score = 0.0;
    double neg_score = 0.0;

    bool operator==(const Segment&) const = default;
};

enum class TopicLevel { L3, L4 };

std::string_view to_string(TopicLevel l) noexcept;
TopicLevel parse_level(std::string_view s);

struct GranularTopic {
    std::string id;
    std::string name;    // L3 (or L4) display name
    std::string hinge;   // L2
    std::string coarse;  // L1
    Polarity polarity = Polarity::Positive;
    std::vector<std::string> keywords;
    TopicLevel level = TopicLevel::L3;
    std::optional<std::string> parent_l3;  // set iff level == L4

    bool operator==(const GranularTopic&) const = default;
};

/// Stable identity derived from (name, polarity): lowercased alphanumeric runs
/// joined by '-', suffixed with ".pos" / ".neg" / ".neu".
std::string topic_slug(std::string_view name, Polarity polarity);

struct Taxonomy {
    std::vector<GranularTopic> topics;
    int version = 1;

    const GranularTopic* find(std::string_view id) const noexcept;
    bool operator==(const Taxonomy&) const = default;
};

struct TaxonomyViolation {
    std::string topic_id;
    std::string rule;
    std::string message;
};

/// Checks every structural rule of a taxonomy. Violations are data; an empty
/// result means the taxonomy is usable by matching and post-processing.
std::vector<TaxonomyViolation> validate_taxonomy(const Taxonomy& t);

enum class Provenance { Matched, GeneratedExisting, GeneratedL4, GeneratedNewL3 };

std::string_view to_string(Provenance p) noexcept;
Provenance parse_provenance(std::string_view s);

struct Insight {
    std::string topic;                        // display name (L3, or L4 / new topic name)
    std::optional<std::string> topic_id;      // bound taxonomy topic, if any
    std::optional<std::string> parent_topic;  // L3 name when `topic` is an L4 subtopic
    Polarity polarity = Polarity::Positive;
    std::vector<std::string> verbatims;
    Provenance provenance = Provenance::Matched;

    /// Name used for (L3, polarity) scoring.
    const std::string& l3_name() const noexcept { return parent_topic ? *parent_topic : topic; }

    bool operator==(const Insight&) const = default;
};

struct LabelledRecord {
    Review review;
    std::vector<Insight> insights;

    bool operator==(const LabelledRecord&) const = default;
};

}  // namespace reviewlens
