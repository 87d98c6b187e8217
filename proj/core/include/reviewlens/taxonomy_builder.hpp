#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "reviewlens/embedding.hpp"
#include "reviewlens/json.hpp"
#include "reviewlens/model.hpp"

namespace reviewlens {

struct ClusterConfig {
    double sim_threshold = 0.75;
    std::size_t min_cluster_size = 3;

    void validate() const;
};

struct Cluster {
    std::string id;
    Polarity polarity = Polarity::Positive;
    std::vector<std::string> members;  // input order
    std::string representative;        // member with the highest mean similarity to the others

    bool operator==(const Cluster&) const = default;
};

/// Greedy threshold community detection over segment embeddings.
///
/// Every text counts its neighbours (cosine >= sim_threshold, itself
/// included). Candidate centres are visited by decreasing neighbour count,
/// ties by input order; a centre that is still unassigned claims its
/// unassigned neighbours when they number at least min_cluster_size.
/// Unclaimed texts stay unclustered. All segments must carry `polarity`.
std::vector<Cluster> fast_cluster(std::span<const Segment> segments, Polarity polarity, const ClusterConfig& cfg,
                                  const Similarity& sim);

/// One annotator-editable row of the review file.
struct ReviewEntry {
    std::string cluster_id;
    Polarity polarity = Polarity::Positive;
    std::string suggested_name;
    std::vector<std::string> members;
    std::optional<std::string> merge_into;
    std::string assigned_hinge;
    std::string assigned_coarse;

    bool operator==(const ReviewEntry&) const = default;
};

struct ReviewFile {
    std::vector<ReviewEntry> clusters;

    bool operator==(const ReviewFile&) const = default;
};

void to_json(Json& j, const Cluster& c);
void from_json(const Json& j, Cluster& c);
void to_json(Json& j, const ReviewFile& f);
void from_json(const Json& j, ReviewFile& f);

/// Unnamed, unmerged review rows for annotators to fill in.
ReviewFile export_review_file(std::span<const Cluster> clusters);

/// Resolves merges (chains allowed, cycles and dangling targets rejected) and
/// turns every surviving named cluster into an L3 topic whose keywords are the
/// union of the merged members. Produces taxonomy version 1. Throws DataError.
Taxonomy import_review_file(const ReviewFile& f);

struct CleanConfig {
    double delta_intra = 0.9;  // redundancy threshold within a topic
    double delta_e = 0.85;     // ambiguity threshold across topics

    void validate() const;
};

/// Drops redundant keywords. Pairs (i < j) are scanned in input order and the
/// later keyword of every pair above delta_intra is removed; survivors keep
/// their input order.
std::vector<std::string> intra_cluster_clean(std::span<const std::string> keywords, const CleanConfig& cfg,
                                             const Similarity& sim);

struct TopicKeywords {
    std::string topic;
    std::vector<std::string> keywords;

    bool operator==(const TopicKeywords&) const = default;
};

struct InterCleanResult {
    std::vector<TopicKeywords> topics;
    std::vector<std::string> emptied;  // topics left with no keywords
};

/// Removes both keywords of every cross-topic pair whose similarity exceeds
/// delta_e. Pairs are judged on the input lists, so the result is idempotent.
InterCleanResult inter_cluster_clean(std::span<const TopicKeywords> topics, const CleanConfig& cfg,
                                     const Similarity& sim);

struct TaxonomyCleanResult {
    Taxonomy taxonomy;  // version bumped by one
    std::vector<std::string> emptied;
    std::size_t removed_intra = 0;
    std::size_t removed_inter = 0;
};

/// Intra-cluster cleaning of every L3 topic, then inter-cluster cleaning
/// across all L3 topics.
TaxonomyCleanResult clean_taxonomy(const Taxonomy& t, const CleanConfig& cfg, const Similarity& sim);

/// Measurable stand-ins for the manual exclusivity / exhaustivity review.
struct QualityReport {
    std::size_t coarse_topics = 0;
    std::size_t hinge_topics = 0;
    std::size_t l3_topics = 0;
    std::size_t l4_topics = 0;
    std::size_t keywords = 0;
    std::size_t l3_pairs = 0;
    std::size_t similar_name_pairs = 0;  // name similarity > delta_e
    double exclusivity = 1.0;
    double delta_e = 0.0;
    // Per keyword: best similarity to any keyword of another L3 topic,
    // binned in tenths ([0,0.1) ... [0.9,1]).
    std::array<std::size_t, 10> keyword_overlap_histogram{};
    std::vector<std::string> empty_topics;
};

void to_json(Json& j, const QualityReport& r);

QualityReport taxonomy_quality_report(const Taxonomy& t, const CleanConfig& cfg, const Similarity& sim);

}  // namespace reviewlens
