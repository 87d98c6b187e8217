#include "reviewlens/postprocess.hpp"

#include <algorithm>
#include <map>

#include "reviewlens/error.hpp"
#include "reviewlens/matching.hpp"
#include "reviewlens/parallel.hpp"
#include "reviewlens/text.hpp"

namespace reviewlens {

void PostConfig::validate() const {
    if (!(l4_verbatim > 0.0)) throw ValidationError("post.l4_verbatim", "must be > 0");
    if (!(l4_verbatim <= l4_topic)) throw ValidationError("post.l4_verbatim", "must not exceed l4_topic");
    if (!(l4_topic <= exact_replace)) throw ValidationError("post.l4_topic", "must not exceed exact_replace");
    if (!(exact_replace <= 1.0)) throw ValidationError("post.exact_replace", "must be <= 1");
}

std::string_view to_string(PostOutcome o) noexcept {
    switch (o) {
        case PostOutcome::SyntacticExact: return "syntactic_exact";
        case PostOutcome::SyntacticPartial: return "syntactic_partial";
        case PostOutcome::ReplacedSemantic: return "replaced_semantic";
        case PostOutcome::SurfacedL4: return "surfaced_l4";
        case PostOutcome::SurfacedNewL3: return "surfaced_new_l3";
    }
    return "surfaced_new_l3";
}

namespace {

// Needle words appear in hay in order, gaps allowed.
bool is_subsequence(const std::vector<std::string>& needle, const std::vector<std::string>& hay) {
    if (needle.empty()) return false;
    std::size_t i = 0;
    for (const auto& w : hay) {
        if (i < needle.size() && w == needle[i]) ++i;
    }
    return i == needle.size();
}

bool polarity_ok(const GranularTopic& t, std::optional<Polarity> p) { return !p || t.polarity == *p; }

}  // namespace

std::optional<SyntacticMatch> syntactic_match(std::string_view generated, const Taxonomy& t,
                                              std::optional<Polarity> polarity) {
    const std::string folded = text::lower(text::trim(generated));
    const auto needle = text::tokens(generated);
    const GranularTopic* exact = nullptr;
    const GranularTopic* partial = nullptr;
    for (const auto& topic : t.topics) {
        if (!polarity_ok(topic, polarity)) continue;
        if (text::lower(text::trim(topic.name)) == folded) {
            if (!exact || topic.id < exact->id) exact = &topic;
        } else if (is_subsequence(needle, text::tokens(topic.name))) {
            if (!partial || topic.id < partial->id) partial = &topic;
        }
    }
    if (exact) return SyntacticMatch{exact, true};
    if (partial) return SyntacticMatch{partial, false};
    return std::nullopt;
}

PostOutcome route_semantic(double score_t, double score_v, const PostConfig& cfg) noexcept {
    if (score_t > cfg.exact_replace) return PostOutcome::ReplacedSemantic;
    if (score_t > cfg.l4_topic && score_v > cfg.l4_verbatim) return PostOutcome::SurfacedL4;
    return PostOutcome::SurfacedNewL3;
}

PostDecision semantic_match(std::string_view generated, std::span<const std::string> verbatims, const Taxonomy& t,
                            const PostConfig& cfg, const Similarity& sim, std::optional<Polarity> polarity) {
    PostDecision d;
    d.input_topic = std::string(generated);
    std::vector<const GranularTopic*> topics;
    for (const auto& topic : t.topics) {
        if (topic.level == TopicLevel::L3 && polarity_ok(topic, polarity)) topics.push_back(&topic);
    }
    d.score_t = 0.0;
    d.score_v = 0.0;
    if (topics.empty()) {
        d.outcome = PostOutcome::SurfacedNewL3;
        return d;
    }

    const auto g = sim.unit(generated);
    std::vector<double> name_scores;
    for (const auto* topic : topics) name_scores.push_back(dot(*g, *sim.unit(topic->name)));
    const auto by_name = best_topic_and_score(topics, name_scores);

    std::vector<EmbeddingCache::Entry> verbatim_vecs;
    for (const auto& v : verbatims) {
        if (!text::trim(v).empty()) verbatim_vecs.push_back(sim.unit(v));
    }
    if (!verbatim_vecs.empty()) {
        std::vector<double> kw_scores;
        for (const auto* topic : topics) {
            double best = -1.0;
            for (const auto& kw : topic->keywords) {
                const auto k = sim.unit(kw);
                for (const auto& v : verbatim_vecs) best = std::max(best, dot(*v, *k));
            }
            kw_scores.push_back(best);
        }
        const auto by_keyword = best_topic_and_score(topics, kw_scores);
        d.score_v = by_keyword.score;
        d.topic_v = by_keyword.topic;
    }

    d.score_t = by_name.score;
    d.outcome = route_semantic(*d.score_t, *d.score_v, cfg);
    if (d.outcome != PostOutcome::SurfacedNewL3) d.topic = by_name.topic;
    return d;
}

void to_json(Json& j, const TaxonomyDelta& d) {
    auto rows = [](const std::vector<ProposedTopic>& ps) {
        Json out = Json::array();
        for (const auto& p : ps) {
            Json row{{"name", p.name},
                     {"polarity", to_string(p.polarity)},
                     {"evidence", p.evidence},
                     {"occurrences", p.occurrences}};
            if (p.parent_id) row["parent_l3"] = *p.parent_id;
            out.push_back(std::move(row));
        }
        return out;
    };
    j = Json{{"base_version", d.base_version}, {"l4", rows(d.l4)}, {"new_l3", rows(d.new_l3)}};
}

void from_json(const Json& j, TaxonomyDelta& d) {
    auto rows = [](const Json& arr) {
        std::vector<ProposedTopic> out;
        for (const auto& row : arr) {
            ProposedTopic p;
            p.name = row.at("name").get<std::string>();
            p.polarity = parse_polarity(row.at("polarity").get<std::string>());
            p.evidence = row.value("evidence", std::vector<std::string>{});
            p.occurrences = row.value("occurrences", std::size_t{0});
            if (row.contains("parent_l3")) p.parent_id = row.at("parent_l3").get<std::string>();
            out.push_back(std::move(p));
        }
        return out;
    };
    d.base_version = j.value("base_version", 0);
    d.l4 = rows(j.at("l4"));
    d.new_l3 = rows(j.at("new_l3"));
}

namespace {

struct BundleOutcome {
    LabelledRecord record;
    std::vector<PostDecision> decisions;
};

BundleOutcome process_bundle(const RawBundle& b, const Taxonomy& t, const PostConfig& cfg, const Similarity& sim) {
    BundleOutcome out{{b.review, {}}, {}};
    std::map<std::pair<std::string, Polarity>, std::size_t> slot;

    for (const auto& gen : b.topics) {
        PostDecision d;
        if (const auto syn = syntactic_match(gen.name, t, gen.polarity)) {
            d.input_topic = gen.name;
            d.outcome = syn->exact ? PostOutcome::SyntacticExact : PostOutcome::SyntacticPartial;
            d.topic = syn->topic;
        } else {
            d = semantic_match(gen.name, gen.verbatims, t, cfg, sim, gen.polarity);
        }

        Insight ins;
        ins.polarity = gen.polarity;
        switch (d.outcome) {
            case PostOutcome::SyntacticExact:
            case PostOutcome::SyntacticPartial:
            case PostOutcome::ReplacedSemantic: {
                ins.topic = d.topic->name;
                ins.topic_id = d.topic->id;
                ins.provenance = Provenance::GeneratedExisting;
                if (d.topic->level == TopicLevel::L4) {
                    const GranularTopic* parent = d.topic->parent_l3 ? t.find(*d.topic->parent_l3) : nullptr;
                    ins.parent_topic = parent ? parent->name : std::string();
                    ins.provenance = Provenance::GeneratedL4;
                }
                break;
            }
            case PostOutcome::SurfacedL4:
                ins.topic = gen.name;
                ins.parent_topic = d.topic->name;
                ins.provenance = Provenance::GeneratedL4;
                break;
            case PostOutcome::SurfacedNewL3:
                ins.topic = gen.name;
                ins.provenance = Provenance::GeneratedNewL3;
                break;
        }

        const auto key = std::make_pair(text::lower(ins.topic) + "\x1f" + text::lower(ins.parent_topic.value_or("")),
                                        ins.polarity);
        const auto [it, fresh] = slot.emplace(key, out.record.insights.size());
        if (fresh) {
            ins.verbatims = gen.verbatims;
            out.record.insights.push_back(std::move(ins));
        } else {
            auto& existing = out.record.insights[it->second].verbatims;
            for (const auto& v : gen.verbatims) {
                if (std::find(existing.begin(), existing.end(), v) == existing.end()) existing.push_back(v);
            }
        }
        out.decisions.push_back(std::move(d));
    }
    return out;
}

void propose(std::vector<ProposedTopic>& list, ProposedTopic p) {
    const auto folded = text::lower(text::trim(p.name));
    for (auto& existing : list) {
        if (text::lower(text::trim(existing.name)) == folded) {
            ++existing.occurrences;
            for (const auto& v : p.evidence) {
                if (std::find(existing.evidence.begin(), existing.evidence.end(), v) == existing.evidence.end()) {
                    existing.evidence.push_back(v);
                }
            }
            return;
        }
    }
    p.occurrences = 1;
    list.push_back(std::move(p));
}

}  // namespace

PostResult apply_postprocessing(std::span<const RawBundle> bundles, const Taxonomy& t, const PostConfig& cfg,
                                const Similarity& sim, std::size_t jobs) {
    cfg.validate();
    auto outcomes =
        parallel_map(bundles, jobs, [&](const RawBundle& b) { return process_bundle(b, t, cfg, sim); });

    PostResult result;
    result.delta.base_version = t.version;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const auto& b = bundles[i];
        for (std::size_t k = 0; k < outcomes[i].decisions.size(); ++k) {
            const auto& d = outcomes[i].decisions[k];
            const auto& gen = b.topics[k];
            if (d.outcome == PostOutcome::SurfacedL4) {
                propose(result.delta.l4, ProposedTopic{gen.name, gen.polarity, d.topic->id, gen.verbatims, 0});
            } else if (d.outcome == PostOutcome::SurfacedNewL3) {
                propose(result.delta.new_l3, ProposedTopic{gen.name, gen.polarity, std::nullopt, gen.verbatims, 0});
            }
        }
        result.records.push_back(std::move(outcomes[i].record));
        result.decisions.push_back(std::move(outcomes[i].decisions));
    }
    return result;
}

Taxonomy apply_delta(const Taxonomy& t, const TaxonomyDelta& d) {
    Taxonomy out = t;
    out.version = t.version + 1;
    for (const auto& p : d.l4) {
        const GranularTopic* parent = p.parent_id ? t.find(*p.parent_id) : nullptr;
        if (!parent) throw DataError("L4 proposal '" + p.name + "' has no valid parent");
        GranularTopic topic;
        topic.name = p.name;
        topic.polarity = p.polarity;
        topic.id = topic_slug(p.name, p.polarity);
        topic.hinge = parent->hinge;
        topic.coarse = parent->coarse;
        topic.keywords = p.evidence;
        topic.level = TopicLevel::L4;
        topic.parent_l3 = parent->id;
        out.topics.push_back(std::move(topic));
    }
    for (const auto& p : d.new_l3) {
        GranularTopic topic;
        topic.name = p.name;
        topic.polarity = p.polarity;
        topic.id = topic_slug(p.name, p.polarity);
        topic.hinge = "unassigned";
        topic.coarse = "unassigned";
        topic.keywords = p.evidence;
        topic.level = TopicLevel::L3;
        out.topics.push_back(std::move(topic));
    }
    return out;
}

Json hierarchical_insight(const std::string& review_id, const Insight& insight, const Taxonomy& t) {
    Json row{{"review_id", review_id},
             {"polarity", to_string(insight.polarity)},
             {"verbatims", insight.verbatims},
             {"provenance", to_string(insight.provenance)}};
    const GranularTopic* bound = insight.topic_id ? t.find(*insight.topic_id) : nullptr;
    const GranularTopic* l3 = nullptr;

    if (insight.parent_topic) {
        // L4 insight: hierarchy comes from the parent L3.
        if (bound && bound->parent_l3) l3 = t.find(*bound->parent_l3);
        if (!l3) {
            for (const auto& topic : t.topics) {
                if (topic.level == TopicLevel::L3 && topic.polarity == insight.polarity &&
                    text::iequals(topic.name, *insight.parent_topic)) {
                    l3 = &topic;
                    break;
                }
            }
        }
        row["L3"] = *insight.parent_topic;
        row["L4"] = insight.topic;
    } else {
        l3 = bound;
        row["L3"] = insight.topic;
    }
    row["L1"] = l3 ? Json(l3->coarse) : Json(nullptr);
    row["L2"] = l3 ? Json(l3->hinge) : Json(nullptr);
    return row;
}

RawBundle as_bundle(const LabelledRecord& rec) {
    RawBundle b{rec.review, {}, {}};
    for (const auto& ins : rec.insights) b.topics.push_back(RawTopic{ins.topic, ins.polarity, ins.verbatims});
    return b;
}

}  // namespace reviewlens
