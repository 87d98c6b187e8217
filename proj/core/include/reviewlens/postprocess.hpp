#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "reviewlens/adapter.hpp"
#include "reviewlens/embedding.hpp"
#include "reviewlens/json.hpp"
#include "reviewlens/model.hpp"

namespace reviewlens {

struct PostConfig {
    double exact_replace = 0.95;  // score_t above this replaces the generated topic
    double l4_topic = 0.7;        // score_t above this (with score_v) surfaces an L4
    double l4_verbatim = 0.4;

    void validate() const;
};

enum class PostOutcome { SyntacticExact, SyntacticPartial, ReplacedSemantic, SurfacedL4, SurfacedNewL3 };

std::string_view to_string(PostOutcome o) noexcept;

struct PostDecision {
    std::string input_topic;
    PostOutcome outcome = PostOutcome::SurfacedNewL3;
    // Matched or replacing topic, or the L4 parent. Null for new L3 topics.
    const GranularTopic* topic = nullptr;
    // Present iff the semantic path ran.
    std::optional<double> score_t;
    std::optional<double> score_v;
    const GranularTopic* topic_v = nullptr;  // audit only
};

struct SyntacticMatch {
    const GranularTopic* topic = nullptr;
    bool exact = false;
};

/// Case-folded name equality first; otherwise the generated topic's words must
/// appear in order among a topic name's words (lowest id wins).
/// With `polarity`, only topics of that polarity are considered.
std::optional<SyntacticMatch> syntactic_match(std::string_view generated, const Taxonomy& t,
                                              std::optional<Polarity> polarity = std::nullopt);

/// Strict-inequality routing on precomputed scores.
PostOutcome route_semantic(double score_t, double score_v, const PostConfig& cfg) noexcept;

/// score_t: best similarity between the generated topic and an L3 name.
/// score_v: best similarity between any extracted verbatim and any L3
/// keyword (0 without verbatims). An empty candidate set surfaces a new L3.
PostDecision semantic_match(std::string_view generated, std::span<const std::string> verbatims, const Taxonomy& t,
                            const PostConfig& cfg, const Similarity& sim,
                            std::optional<Polarity> polarity = std::nullopt);

struct ProposedTopic {
    std::string name;
    Polarity polarity = Polarity::Positive;
    std::optional<std::string> parent_id;  // L4 proposals only
    std::vector<std::string> evidence;     // verbatims that surfaced it
    std::size_t occurrences = 0;
};

/// Proposed additions for human review; never applied implicitly.
struct TaxonomyDelta {
    int base_version = 0;
    std::vector<ProposedTopic> l4;
    std::vector<ProposedTopic> new_l3;

    bool empty() const noexcept { return l4.empty() && new_l3.empty(); }
    std::size_t size() const noexcept { return l4.size() + new_l3.size(); }
};

void to_json(Json& j, const TaxonomyDelta& d);
void from_json(const Json& j, TaxonomyDelta& d);

struct PostResult {
    std::vector<LabelledRecord> records;
    std::vector<std::vector<PostDecision>> decisions;  // per bundle, per generated topic
    TaxonomyDelta delta;
};

/// Routes every generated topic through syntactic then semantic matching.
/// Candidate topics share the generated topic's polarity. Generated topics
/// that resolve to the same label within a review are merged.
PostResult apply_postprocessing(std::span<const RawBundle> bundles, const Taxonomy& t, const PostConfig& cfg,
                                const Similarity& sim, std::size_t jobs = 1);

/// New taxonomy version with the proposals added: L4 topics under their
/// parent's hierarchy, new L3 topics under an "unassigned" hinge and coarse
/// topic. Evidence verbatims become keywords.
Taxonomy apply_delta(const Taxonomy& t, const TaxonomyDelta& d);

/// Row shaped {"review_id","L1","L2","L3","L4"?,"polarity","verbatims","provenance"}.
Json hierarchical_insight(const std::string& review_id, const Insight& insight, const Taxonomy& t);

/// Post-processed insights read back as generated topics.
RawBundle as_bundle(const LabelledRecord& rec);

}  // namespace reviewlens
