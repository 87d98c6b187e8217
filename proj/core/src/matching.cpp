#include "reviewlens/matching.hpp"

#include <algorithm>
#include <functional>

#include "reviewlens/error.hpp"

namespace reviewlens {

void MatchConfig::validate() const {
    if (k < 1) throw ValidationError("match.k", "must be >= 1");
    if (!(delta_m > 0.0)) throw ValidationError("match.delta_m", "must be > 0");
    if (!(delta_m <= delta_h)) throw ValidationError("match.delta_m", "must not exceed delta_h");
    if (!(delta_h <= 1.0)) throw ValidationError("match.delta_h", "must be <= 1");
    if (!(delta_avg > 0.0 && delta_avg <= 1.0)) throw ValidationError("match.delta_avg", "must be in (0, 1]");
}

std::string_view to_string(MatchRule r) noexcept {
    switch (r) {
        case MatchRule::HighConfTkw: return "high_conf_tkw";
        case MatchRule::HighConfN: return "high_conf_n";
        case MatchRule::HighConfMkw: return "high_conf_mkw";
        case MatchRule::MajorityTkwN: return "majority_tkw_n";
        case MatchRule::MajorityMkwTkw: return "majority_mkw_tkw";
        case MatchRule::MajorityNMkw: return "majority_n_mkw";
        case MatchRule::BestAverage: return "best_average";
        case MatchRule::NoMatch: return "no_match";
    }
    return "no_match";
}

SignalResult best_topic_and_score(std::span<const GranularTopic* const> topics, std::span<const double> scores) {
    if (topics.empty()) throw DataError("best_topic_and_score: empty topic list");
    if (topics.size() != scores.size()) throw DataError("best_topic_and_score: topics and scores differ in length");
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i) {
        if (scores[i] > scores[best]) best = i;
    }
    return {topics[best], scores[best]};
}

std::vector<const GranularTopic*> candidate_topics(const Taxonomy& t, Polarity polarity) {
    std::vector<const GranularTopic*> out;
    for (const auto& topic : t.topics) {
        if (topic.level == TopicLevel::L3 && topic.polarity == polarity) out.push_back(&topic);
    }
    return out;
}

namespace {

void require_candidates(std::span<const GranularTopic* const> topics) {
    if (topics.empty()) throw DataError("no candidate topics for segment");
}

void require_keywords(const GranularTopic& t) {
    if (t.keywords.empty()) throw DataError("topic '" + t.id + "' has no keywords");
}

// Similarities between the segment and each keyword of `t`.
std::vector<double> keyword_sims(const EmbeddingVector& seg, const GranularTopic& t, const Similarity& sim) {
    require_keywords(t);
    std::vector<double> out;
    out.reserve(t.keywords.size());
    for (const auto& kw : t.keywords) out.push_back(dot(seg, *sim.unit(kw)));
    return out;
}

double topk_mean(std::vector<double> sims, std::size_t k) {
    const std::size_t m = std::min(k, sims.size());
    std::partial_sort(sims.begin(), sims.begin() + static_cast<std::ptrdiff_t>(m), sims.end(), std::greater<>());
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) sum += sims[i];
    return sum / static_cast<double>(m);
}

double plain_mean(const std::vector<double>& sims) {
    double sum = 0.0;
    for (double s : sims) sum += s;
    return sum / static_cast<double>(sims.size());
}

SignalSet compute_signals(const Segment& seg, std::span<const GranularTopic* const> topics, const Similarity& sim,
                          std::size_t k) {
    require_candidates(topics);
    const auto seg_vec = sim.unit(seg.text);
    std::vector<double> name(topics.size());
    std::vector<double> topk(topics.size());
    std::vector<double> mean(topics.size());
    std::vector<double> avg(topics.size());
    for (std::size_t i = 0; i < topics.size(); ++i) {
        const auto sims = keyword_sims(*seg_vec, *topics[i], sim);
        name[i] = dot(*seg_vec, *sim.unit(topics[i]->name));
        topk[i] = topk_mean(sims, k);
        mean[i] = plain_mean(sims);
        avg[i] = (name[i] + topk[i] + mean[i]) / 3.0;
    }
    return {best_topic_and_score(topics, name), best_topic_and_score(topics, topk),
            best_topic_and_score(topics, mean), best_topic_and_score(topics, avg)};
}

}  // namespace

SignalResult signal_name(const Segment& seg, std::span<const GranularTopic* const> topics, const Similarity& sim) {
    require_candidates(topics);
    const auto seg_vec = sim.unit(seg.text);
    std::vector<double> scores;
    scores.reserve(topics.size());
    for (const auto* t : topics) scores.push_back(dot(*seg_vec, *sim.unit(t->name)));
    return best_topic_and_score(topics, scores);
}

SignalResult signal_topk_keywords(const Segment& seg, std::span<const GranularTopic* const> topics,
                                  const Similarity& sim, std::size_t k) {
    require_candidates(topics);
    if (k < 1) throw ValidationError("match.k", "must be >= 1");
    const auto seg_vec = sim.unit(seg.text);
    std::vector<double> scores;
    scores.reserve(topics.size());
    for (const auto* t : topics) scores.push_back(topk_mean(keyword_sims(*seg_vec, *t, sim), k));
    return best_topic_and_score(topics, scores);
}

SignalResult signal_mean_keywords(const Segment& seg, std::span<const GranularTopic* const> topics,
                                  const Similarity& sim) {
    require_candidates(topics);
    const auto seg_vec = sim.unit(seg.text);
    std::vector<double> scores;
    scores.reserve(topics.size());
    for (const auto* t : topics) scores.push_back(plain_mean(keyword_sims(*seg_vec, *t, sim)));
    return best_topic_and_score(topics, scores);
}

MatchOutcome resolve_cascade(const SignalSet& s, const MatchConfig& cfg) {
    const SignalResult& n = s.name;
    const SignalResult& tkw = s.topk;
    const SignalResult& mkw = s.mean;
    const SignalResult& avg = s.avg;
    const double pair_floor = 2.0 * cfg.delta_m;
    auto pick = [&](const SignalResult& r, MatchRule rule) { return MatchOutcome{r.topic, rule, s}; };

    if (tkw.score >= cfg.delta_h) return pick(tkw, MatchRule::HighConfTkw);
    if (n.score >= cfg.delta_h) return pick(n, MatchRule::HighConfN);
    if (mkw.score >= cfg.delta_h) return pick(mkw, MatchRule::HighConfMkw);
    if (tkw.topic == n.topic && tkw.score + n.score >= pair_floor) return pick(tkw, MatchRule::MajorityTkwN);
    if (mkw.topic == tkw.topic && mkw.score + tkw.score >= pair_floor) return pick(mkw, MatchRule::MajorityMkwTkw);
    if (n.topic == mkw.topic && n.score + mkw.score >= pair_floor) return pick(n, MatchRule::MajorityNMkw);
    if (avg.score >= cfg.delta_avg) return pick(avg, MatchRule::BestAverage);
    return MatchOutcome{nullptr, MatchRule::NoMatch, s};
}

MatchOutcome match_topic(const Segment& seg, const Taxonomy& taxonomy, const MatchConfig& cfg, const Similarity& sim) {
    if (!seg.polarity || *seg.polarity == Polarity::Neutral) {
        throw DataError("match_topic requires a positive or negative segment");
    }
    const auto topics = candidate_topics(taxonomy, *seg.polarity);
    if (topics.empty()) {
        throw DataError("taxonomy has no " + std::string(to_string(*seg.polarity)) + " topics");
    }
    return resolve_cascade(compute_signals(seg, topics, sim, cfg.k), cfg);
}

TopicMatcher::TopicMatcher(const Taxonomy& taxonomy, MatchConfig cfg, Similarity sim)
    : positive_(candidate_topics(taxonomy, Polarity::Positive)),
      negative_(candidate_topics(taxonomy, Polarity::Negative)),
      cfg_(cfg),
      sim_(sim) {
    cfg_.validate();
}

MatchOutcome TopicMatcher::match(const Segment& seg) const {
    if (!seg.polarity || *seg.polarity == Polarity::Neutral) {
        throw DataError("cannot match a segment without positive or negative polarity");
    }
    const auto& topics = *seg.polarity == Polarity::Positive ? positive_ : negative_;
    if (topics.empty()) return {};
    return resolve_cascade(compute_signals(seg, topics, sim_, cfg_.k), cfg_);
}

}  // namespace reviewlens
