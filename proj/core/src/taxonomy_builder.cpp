#include "reviewlens/taxonomy_builder.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <unordered_set>

#include "reviewlens/error.hpp"

namespace reviewlens {

void ClusterConfig::validate() const {
    if (!(sim_threshold > 0.0 && sim_threshold < 1.0)) {
        throw ValidationError("cluster.sim_threshold", "must be in (0, 1)");
    }
    if (min_cluster_size < 1) throw ValidationError("cluster.min_cluster_size", "must be >= 1");
}

void CleanConfig::validate() const {
    if (!(delta_intra > 0.0 && delta_intra < 1.0)) throw ValidationError("clean.delta_intra", "must be in (0, 1)");
    if (!(delta_e > 0.0 && delta_e < 1.0)) throw ValidationError("clean.delta_e", "must be in (0, 1)");
}

std::vector<Cluster> fast_cluster(std::span<const Segment> segments, Polarity polarity, const ClusterConfig& cfg,
                                  const Similarity& sim) {
    cfg.validate();
    const std::size_t n = segments.size();
    std::vector<EmbeddingCache::Entry> vecs;
    vecs.reserve(n);
    for (const auto& s : segments) {
        if (s.polarity != polarity) {
            throw DataError("fast_cluster: segment '" + s.text + "' does not have polarity " +
                            std::string(to_string(polarity)));
        }
        vecs.push_back(sim.unit(s.text));
    }

    std::vector<std::vector<double>> cos(n, std::vector<double>(n, 0.0));
    std::vector<std::vector<std::size_t>> neighbours(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const double c = i == j ? 1.0 : dot(*vecs[i], *vecs[j]);
            cos[i][j] = cos[j][i] = c;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j || cos[i][j] >= cfg.sim_threshold) neighbours[i].push_back(j);
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return neighbours[a].size() > neighbours[b].size(); });

    const std::string prefix = polarity == Polarity::Positive ? "pos-" : polarity == Polarity::Negative ? "neg-" : "neu-";
    std::vector<bool> assigned(n, false);
    std::vector<Cluster> out;
    for (std::size_t centre : order) {
        if (assigned[centre]) continue;
        std::vector<std::size_t> group;
        for (std::size_t j : neighbours[centre]) {
            if (!assigned[j]) group.push_back(j);
        }
        if (group.size() < cfg.min_cluster_size) continue;
        for (std::size_t j : group) assigned[j] = true;

        Cluster c;
        c.id = prefix + std::to_string(out.size());
        c.polarity = polarity;
        std::size_t rep = group.front();
        double best = -2.0;
        for (std::size_t a : group) {
            c.members.push_back(segments[a].text);
            double mean = 1.0;
            if (group.size() > 1) {
                double sum = 0.0;
                for (std::size_t b : group) {
                    if (a != b) sum += cos[a][b];
                }
                mean = sum / static_cast<double>(group.size() - 1);
            }
            if (mean > best) {
                best = mean;
                rep = a;
            }
        }
        c.representative = segments[rep].text;
        out.push_back(std::move(c));
    }
    return out;
}

void to_json(Json& j, const Cluster& c) {
    j = Json{{"id", c.id},
             {"polarity", to_string(c.polarity)},
             {"members", c.members},
             {"representative", c.representative}};
}

void from_json(const Json& j, Cluster& c) {
    c.id = j.at("id").get<std::string>();
    c.polarity = parse_polarity(j.at("polarity").get<std::string>());
    c.members = j.at("members").get<std::vector<std::string>>();
    c.representative = j.value("representative", c.members.empty() ? std::string() : c.members.front());
}

void to_json(Json& j, const ReviewFile& f) {
    Json rows = Json::array();
    for (const auto& e : f.clusters) {
        rows.push_back(Json{{"cluster_id", e.cluster_id},
                            {"polarity", to_string(e.polarity)},
                            {"suggested_name", e.suggested_name},
                            {"members", e.members},
                            {"merge_into", e.merge_into ? Json(*e.merge_into) : Json(nullptr)},
                            {"assigned_hinge", e.assigned_hinge},
                            {"assigned_coarse", e.assigned_coarse}});
    }
    j = Json{{"clusters", std::move(rows)}};
}

void from_json(const Json& j, ReviewFile& f) {
    f.clusters.clear();
    for (const auto& row : j.at("clusters")) {
        ReviewEntry e;
        e.cluster_id = row.at("cluster_id").get<std::string>();
        e.polarity = parse_polarity(row.at("polarity").get<std::string>());
        e.suggested_name = row.value("suggested_name", "");
        e.members = row.at("members").get<std::vector<std::string>>();
        if (row.contains("merge_into") && !row.at("merge_into").is_null()) {
            e.merge_into = row.at("merge_into").get<std::string>();
        }
        e.assigned_hinge = row.value("assigned_hinge", "");
        e.assigned_coarse = row.value("assigned_coarse", "");
        f.clusters.push_back(std::move(e));
    }
}

ReviewFile export_review_file(std::span<const Cluster> clusters) {
    ReviewFile f;
    for (const auto& c : clusters) {
        f.clusters.push_back(ReviewEntry{c.id, c.polarity, "", c.members, std::nullopt, "", ""});
    }
    return f;
}

Taxonomy import_review_file(const ReviewFile& f) {
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < f.clusters.size(); ++i) {
        if (!index.emplace(f.clusters[i].cluster_id, i).second) {
            throw DataError("duplicate cluster id '" + f.clusters[i].cluster_id + "'");
        }
    }

    // Follow merge_into chains to the surviving cluster.
    std::vector<std::size_t> root(f.clusters.size());
    for (std::size_t i = 0; i < f.clusters.size(); ++i) {
        std::set<std::size_t> seen{i};
        std::size_t cur = i;
        while (const auto& target = f.clusters[cur].merge_into) {
            const auto it = index.find(*target);
            if (it == index.end()) {
                throw DataError("cluster '" + f.clusters[cur].cluster_id + "' merges into unknown cluster '" +
                                *target + "'");
            }
            cur = it->second;
            if (!seen.insert(cur).second) {
                throw DataError("merge cycle involving cluster '" + f.clusters[i].cluster_id + "'");
            }
        }
        root[i] = cur;
    }

    Taxonomy t;
    t.version = 1;
    std::map<std::string, std::string> hinge_owner;
    std::set<std::string> ids;
    for (std::size_t r = 0; r < f.clusters.size(); ++r) {
        if (root[r] != r) continue;
        const auto& e = f.clusters[r];
        if (e.suggested_name.empty()) throw DataError("cluster '" + e.cluster_id + "' has no name");
        if (e.assigned_hinge.empty()) throw DataError("cluster '" + e.cluster_id + "' has no hinge topic");
        if (e.assigned_coarse.empty()) throw DataError("cluster '" + e.cluster_id + "' has no coarse topic");
        if (e.polarity == Polarity::Neutral) throw DataError("cluster '" + e.cluster_id + "' is neutral");

        const auto [owner, fresh] = hinge_owner.emplace(e.assigned_hinge, e.assigned_coarse);
        if (!fresh && owner->second != e.assigned_coarse) {
            throw DataError("hinge '" + e.assigned_hinge + "' assigned to coarse topics '" + owner->second +
                            "' and '" + e.assigned_coarse + "'");
        }

        GranularTopic topic;
        topic.name = e.suggested_name;
        topic.polarity = e.polarity;
        topic.id = topic_slug(topic.name, topic.polarity);
        topic.hinge = e.assigned_hinge;
        topic.coarse = e.assigned_coarse;
        topic.level = TopicLevel::L3;
        if (!ids.insert(topic.id).second) {
            throw DataError("two clusters produce topic '" + topic.name + "' (" +
                            std::string(to_string(topic.polarity)) + ")");
        }

        // Surviving cluster's members first, then merged clusters in file order.
        std::unordered_set<std::string> seen;
        auto absorb = [&](const ReviewEntry& src) {
            if (src.polarity != e.polarity) {
                throw DataError("cluster '" + src.cluster_id + "' merges across polarities");
            }
            for (const auto& m : src.members) {
                if (seen.insert(m).second) topic.keywords.push_back(m);
            }
        };
        absorb(e);
        for (std::size_t i = 0; i < f.clusters.size(); ++i) {
            if (root[i] == r && i != r) absorb(f.clusters[i]);
        }
        t.topics.push_back(std::move(topic));
    }
    return t;
}

std::vector<std::string> intra_cluster_clean(std::span<const std::string> keywords, const CleanConfig& cfg,
                                             const Similarity& sim) {
    std::vector<EmbeddingCache::Entry> vecs;
    vecs.reserve(keywords.size());
    for (const auto& k : keywords) vecs.push_back(sim.unit(k));

    std::vector<bool> drop(keywords.size(), false);
    for (std::size_t i = 0; i < keywords.size(); ++i) {
        for (std::size_t j = i + 1; j < keywords.size(); ++j) {
            if (dot(*vecs[i], *vecs[j]) > cfg.delta_intra) drop[j] = true;
        }
    }
    std::vector<std::string> out;
    for (std::size_t i = 0; i < keywords.size(); ++i) {
        if (!drop[i]) out.push_back(keywords[i]);
    }
    return out;
}

InterCleanResult inter_cluster_clean(std::span<const TopicKeywords> topics, const CleanConfig& cfg,
                                     const Similarity& sim) {
    // Embeddings keyed by keyword text; repeated keywords are embedded once.
    std::unordered_map<std::string, EmbeddingCache::Entry> table;
    for (const auto& t : topics) {
        for (const auto& k : t.keywords) {
            if (!table.contains(k)) table.emplace(k, sim.unit(k));
        }
    }

    std::vector<std::vector<bool>> drop(topics.size());
    for (std::size_t i = 0; i < topics.size(); ++i) drop[i].assign(topics[i].keywords.size(), false);

    for (std::size_t i = 0; i < topics.size(); ++i) {
        for (std::size_t a = 0; a < topics[i].keywords.size(); ++a) {
            const auto& va = *table.at(topics[i].keywords[a]);
            for (std::size_t l = i + 1; l < topics.size(); ++l) {
                for (std::size_t b = 0; b < topics[l].keywords.size(); ++b) {
                    if (dot(va, *table.at(topics[l].keywords[b])) > cfg.delta_e) {
                        drop[i][a] = true;
                        drop[l][b] = true;
                    }
                }
            }
        }
    }

    InterCleanResult out;
    for (std::size_t i = 0; i < topics.size(); ++i) {
        TopicKeywords kept{topics[i].topic, {}};
        for (std::size_t a = 0; a < topics[i].keywords.size(); ++a) {
            if (!drop[i][a]) kept.keywords.push_back(topics[i].keywords[a]);
        }
        if (kept.keywords.empty() && !topics[i].keywords.empty()) out.emptied.push_back(kept.topic);
        out.topics.push_back(std::move(kept));
    }
    return out;
}

TaxonomyCleanResult clean_taxonomy(const Taxonomy& t, const CleanConfig& cfg, const Similarity& sim) {
    cfg.validate();
    TaxonomyCleanResult result;
    result.taxonomy = t;
    result.taxonomy.version = t.version + 1;

    std::vector<TopicKeywords> lists;
    std::vector<std::size_t> where;
    for (std::size_t i = 0; i < result.taxonomy.topics.size(); ++i) {
        auto& topic = result.taxonomy.topics[i];
        if (topic.level != TopicLevel::L3) continue;
        auto cleaned = intra_cluster_clean(topic.keywords, cfg, sim);
        result.removed_intra += topic.keywords.size() - cleaned.size();
        lists.push_back({topic.id, std::move(cleaned)});
        where.push_back(i);
    }

    auto inter = inter_cluster_clean(lists, cfg, sim);
    for (std::size_t n = 0; n < where.size(); ++n) {
        auto& topic = result.taxonomy.topics[where[n]];
        result.removed_inter += lists[n].keywords.size() - inter.topics[n].keywords.size();
        topic.keywords = std::move(inter.topics[n].keywords);
    }
    result.emptied = std::move(inter.emptied);
    return result;
}

void to_json(Json& j, const QualityReport& r) {
    j = Json{{"coarse_topics", r.coarse_topics},
             {"hinge_topics", r.hinge_topics},
             {"l3_topics", r.l3_topics},
             {"l4_topics", r.l4_topics},
             {"keywords", r.keywords},
             {"l3_pairs", r.l3_pairs},
             {"similar_name_pairs", r.similar_name_pairs},
             {"exclusivity_proxy", r.exclusivity},
             {"delta_e", r.delta_e},
             {"keyword_overlap_histogram", r.keyword_overlap_histogram},
             {"empty_topics", r.empty_topics}};
}

QualityReport taxonomy_quality_report(const Taxonomy& t, const CleanConfig& cfg, const Similarity& sim) {
    QualityReport r;
    r.delta_e = cfg.delta_e;
    std::set<std::string> coarse;
    std::set<std::string> hinges;
    std::vector<const GranularTopic*> l3;
    for (const auto& topic : t.topics) {
        coarse.insert(topic.coarse);
        hinges.insert(topic.hinge);
        r.keywords += topic.keywords.size();
        if (topic.level == TopicLevel::L3) {
            l3.push_back(&topic);
            if (topic.keywords.empty()) r.empty_topics.push_back(topic.id);
        } else {
            ++r.l4_topics;
        }
    }
    r.coarse_topics = coarse.size();
    r.hinge_topics = hinges.size();
    r.l3_topics = l3.size();

    for (std::size_t a = 0; a < l3.size(); ++a) {
        for (std::size_t b = a + 1; b < l3.size(); ++b) {
            ++r.l3_pairs;
            if (sim(l3[a]->name, l3[b]->name) > cfg.delta_e) ++r.similar_name_pairs;
        }
    }
    r.exclusivity = r.l3_pairs == 0 ? 1.0
                                    : 1.0 - static_cast<double>(r.similar_name_pairs) / static_cast<double>(r.l3_pairs);

    for (std::size_t a = 0; a < l3.size(); ++a) {
        for (const auto& kw : l3[a]->keywords) {
            const auto va = sim.unit(kw);
            std::optional<double> best;
            for (std::size_t b = 0; b < l3.size(); ++b) {
                if (b == a) continue;
                for (const auto& other : l3[b]->keywords) {
                    const double s = dot(*va, *sim.unit(other));
                    if (!best || s > *best) best = s;
                }
            }
            if (!best) continue;
            const auto bin = static_cast<std::size_t>(std::clamp(std::floor(*best * 10.0), 0.0, 9.0));
            ++r.keyword_overlap_histogram[bin];
        }
    }
    return r;
}

}  // namespace reviewlens
