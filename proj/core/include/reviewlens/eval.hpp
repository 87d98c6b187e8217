#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "reviewlens/embedding.hpp"
#include "reviewlens/json.hpp"
#include "reviewlens/model.hpp"

namespace reviewlens {

struct PRF {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;

    bool operator==(const PRF&) const = default;
};

/// P = tp/(tp+fp), R = tp/(tp+fn), F1 their harmonic mean. Undefined ratios
/// count as 0, except that tp = fp = fn = 0 scores 1 across the board.
PRF prf_from_counts(std::size_t tp, std::size_t fp, std::size_t fn) noexcept;

/// Gold and predicted labelling of the same review.
struct EvalPair {
    const LabelledRecord* gold = nullptr;
    const LabelledRecord* pred = nullptr;  // null: nothing predicted
};

/// Pairs predictions with gold records by review id, in gold order. Duplicate
/// ids on either side throw DataError; predictions without gold are counted.
std::vector<EvalPair> align_records(std::span<const LabelledRecord> gold, std::span<const LabelledRecord> pred,
                                    std::size_t* unmatched_predictions = nullptr);

struct EvalOptions {
    bool l3_only = false;      // score L4 insights under their parent L3 name
    double sim_floor = 0.8;    // verbatim match threshold
};

/// Label of an insight: case-folded topic name plus polarity.
std::string insight_label(const Insight& ins, const EvalOptions& opts);

struct LabelScore {
    PRF prf;
    std::size_t tp = 0, fp = 0, fn = 0;
};

struct TopicScores {
    std::size_t tp = 0, fp = 0, fn = 0;
    PRF micro;
    PRF macro;  // mean over labels present in the gold data
    std::map<std::string, LabelScore> per_label;
};

TopicScores topic_scores(std::span<const EvalPair> pairs, const EvalOptions& opts = {});

struct VerbatimScores {
    std::size_t topics = 0;                // true-positive labels scored
    std::optional<double> correctness;     // share of predicted verbatims found in gold
    std::optional<double> completeness;    // share of gold verbatims recovered
};

/// Two verbatims agree when one contains the other (case-folded) or their
/// similarity reaches `opts.sim_floor`. Averaged over true-positive labels;
/// an empty verbatim list on either side scores 0 for the affected share.
VerbatimScores verbatim_scores(std::span<const EvalPair> pairs, const Similarity& sim, const EvalOptions& opts = {});

struct TopicDistribution {
    std::vector<std::pair<std::string, std::size_t>> counts;  // descending, ties by name
    std::vector<double> cumulative;                            // share of insights in the top i+1 topics
    std::size_t total = 0;

    /// Share of all insights held by the top ceil(percent% of topics) topics,
    /// at least one topic. 0 for an empty distribution.
    double coverage_at(double percent) const;
};

TopicDistribution topic_distribution(const std::map<std::string, std::size_t>& counts);
TopicDistribution topic_distribution(std::span<const LabelledRecord> records, const EvalOptions& opts = {});

inline constexpr double kCoveragePoints[] = {5.0, 10.0, 12.0, 25.0, 50.0};

struct MetricReport {
    std::size_t reviews = 0;
    std::size_t unmatched_predictions = 0;
    TopicScores topics;
    VerbatimScores verbatims;
    TopicDistribution gold_distribution;
    TopicDistribution pred_distribution;
    Json thresholds = Json::object();  // configuration the predictions were made with
};

MetricReport evaluate(std::span<const LabelledRecord> gold, std::span<const LabelledRecord> pred,
                      const Similarity& sim, const EvalOptions& opts = {}, Json thresholds = Json::object());

void to_json(Json& j, const PRF& p);
void to_json(Json& j, const TopicDistribution& d);
void to_json(Json& j, const MetricReport& r);

}  // namespace reviewlens
