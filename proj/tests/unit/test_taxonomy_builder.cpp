#include <gtest/gtest.h>

#include <map>
#include <random>

#include "oracle.hpp"
#include "reviewlens/error.hpp"
#include "reviewlens/taxonomy_builder.hpp"
#include "synthetic.hpp"

using namespace reviewlens;

namespace {

// Hand-placed vectors: two tight groups and a loner.
class PlacedProvider final : public EmbeddingProvider {
public:
    PlacedProvider() {
        table_ = {{"a1", {1.0, 0.05, 0}}, {"a2", {1.0, 0.0, 0.1}}, {"a3", {0.95, 0.1, 0}}, {"a4", {1.0, 0.1, 0.1}},
                  {"b1", {0, 1.0, 0.05}}, {"b2", {0.1, 1.0, 0}},   {"b3", {0, 0.9, 0.1}},   {"c", {0, 0, 1}}};
    }
    std::size_t dim() const noexcept override { return 3; }
    EmbeddingVector embed(std::string_view t) const override {
        const auto it = table_.find(std::string(t));
        if (it == table_.end()) throw EmbeddingError("unknown " + std::string(t));
        return EmbeddingVector(it->second);
    }

private:
    std::map<std::string, std::vector<double>> table_;
};

std::vector<Segment> segments(const std::vector<std::string>& texts, Polarity p) {
    std::vector<Segment> out;
    for (const auto& t : texts) out.push_back(Segment{"r", t, {0, t.size()}, p, 0, 0});
    return out;
}

// Keyword lists drawn from a small vocabulary so that near duplicates are common.
std::vector<std::string> keyword_list(std::mt19937_64& rng, std::size_t n, std::size_t vocab) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t words = 1 + rng() % 3;
        std::string kw;
        for (std::size_t w = 0; w < words; ++w) {
            if (!kw.empty()) kw += " ";
            kw += synth::pseudo_word(rng() % vocab, 1);
        }
        out.push_back(kw);
    }
    return out;
}

ReviewEntry entry(std::string id, std::string name, std::vector<std::string> members,
                  std::optional<std::string> merge = std::nullopt, std::string hinge = "fit",
                  std::string coarse = "design", Polarity p = Polarity::Negative) {
    return ReviewEntry{std::move(id), p, std::move(name), std::move(members), std::move(merge), std::move(hinge),
                       std::move(coarse)};
}

}  // namespace

TEST(Cluster, GroupsNeighboursAndLeavesLoners) {
    PlacedProvider p;
    const Similarity sim(p);
    const auto segs = segments({"a1", "b1", "a2", "c", "b2", "a3", "b3", "a4"}, Polarity::Negative);
    const auto clusters = fast_cluster(segs, Polarity::Negative, ClusterConfig{}, sim);
    ASSERT_EQ(clusters.size(), 2u);
    EXPECT_EQ(clusters[0].id, "neg-0");
    EXPECT_EQ(clusters[0].members, (std::vector<std::string>{"a1", "a2", "a3", "a4"}));
    EXPECT_EQ(clusters[1].members, (std::vector<std::string>{"b1", "b2", "b3"}));
    for (const auto& c : clusters) {
        EXPECT_NE(std::find(c.members.begin(), c.members.end(), c.representative), c.members.end());
    }
}

TEST(Cluster, MinClusterSizeFilters) {
    PlacedProvider p;
    const Similarity sim(p);
    const auto segs = segments({"a1", "b1", "a2", "c", "b2", "a3", "b3", "a4"}, Polarity::Negative);
    ClusterConfig cfg;
    cfg.min_cluster_size = 4;
    EXPECT_EQ(fast_cluster(segs, Polarity::Negative, cfg, sim).size(), 1u);
    cfg.min_cluster_size = 1;
    EXPECT_EQ(fast_cluster(segs, Polarity::Negative, cfg, sim).size(), 3u);
}

TEST(Cluster, MembersPartitionAndMeetThreshold) {
    const auto provider = builtin_deterministic_provider(256, 17);
    const Similarity sim(*provider);
    std::mt19937_64 rng(4);
    const auto texts = keyword_list(rng, 120, 25);
    const auto segs = segments(texts, Polarity::Positive);
    ClusterConfig cfg;
    cfg.sim_threshold = 0.6;
    cfg.min_cluster_size = 2;
    const auto clusters = fast_cluster(segs, Polarity::Positive, cfg, sim);
    std::size_t total = 0;
    for (const auto& c : clusters) {
        EXPECT_GE(c.members.size(), cfg.min_cluster_size);
        total += c.members.size();
    }
    EXPECT_LE(total, texts.size());
    EXPECT_GT(clusters.size(), 0u);
}

TEST(Cluster, RejectsWrongPolarity) {
    PlacedProvider p;
    const Similarity sim(p);
    const auto segs = segments({"a1"}, Polarity::Positive);
    EXPECT_THROW(fast_cluster(segs, Polarity::Negative, ClusterConfig{}, sim), DataError);
}

TEST(ReviewFile, ExportImportRoundTrip) {
    const std::vector<Cluster> clusters{{"neg-0", Polarity::Negative, {"tight arms", "arm too tight"}, "tight arms"},
                                        {"neg-1", Polarity::Negative, {"sleeves short"}, "sleeves short"}};
    auto f = export_review_file(clusters);
    ASSERT_EQ(f.clusters.size(), 2u);
    EXPECT_TRUE(f.clusters[0].suggested_name.empty());
    const Json j = f;
    EXPECT_EQ(j.get<ReviewFile>(), f);

    f.clusters[0].suggested_name = "arm fit";
    f.clusters[0].assigned_hinge = "fit";
    f.clusters[0].assigned_coarse = "design";
    f.clusters[1].merge_into = "neg-0";
    const auto t = import_review_file(f);
    EXPECT_EQ(t.version, 1u);
    ASSERT_EQ(t.topics.size(), 1u);
    EXPECT_EQ(t.topics[0].id, "arm-fit.neg");
    EXPECT_EQ(t.topics[0].keywords, (std::vector<std::string>{"tight arms", "arm too tight", "sleeves short"}));
    EXPECT_TRUE(validate_taxonomy(t).empty());
}

TEST(ReviewFile, MergeChainsResolve) {
    ReviewFile f{{entry("a", "arm fit", {"x"}), entry("b", "", {"y"}, "c"), entry("c", "", {"z", "x"}, "a")}};
    const auto t = import_review_file(f);
    ASSERT_EQ(t.topics.size(), 1u);
    EXPECT_EQ(t.topics[0].keywords, (std::vector<std::string>{"x", "y", "z"}));
}

TEST(ReviewFile, ImportErrors) {
    EXPECT_THROW(import_review_file({{entry("a", "n", {"x"}, "b"), entry("b", "m", {"y"}, "a")}}), DataError);
    EXPECT_THROW(import_review_file({{entry("a", "n", {"x"}, "zzz")}}), DataError);
    EXPECT_THROW(import_review_file({{entry("a", "", {"x"})}}), DataError);
    EXPECT_THROW(import_review_file({{entry("a", "n", {"x"}, std::nullopt, "")}}), DataError);
    EXPECT_THROW(import_review_file({{entry("a", "n", {"x"}), entry("a", "m", {"y"})}}), DataError);
    EXPECT_THROW(import_review_file({{entry("a", "n", {"x"}), entry("b", "m", {"y"}, std::nullopt, "fit", "other")}}),
                 DataError);
    EXPECT_THROW(import_review_file({{entry("a", "n", {"x"}), entry("b", "N ", {"y"})}}), DataError);
    EXPECT_THROW(import_review_file({{entry("a", "n", {"x"}),
                                      entry("b", "", {"y"}, "a", "fit", "design", Polarity::Positive)}}),
                 DataError);
}

TEST(Clean, IntraDropsLaterOfRedundantPair) {
    PlacedProvider p;
    const Similarity sim(p);
    const std::vector<std::string> kws{"a1", "c", "a2", "b1"};
    EXPECT_EQ(intra_cluster_clean(kws, CleanConfig{}, sim), (std::vector<std::string>{"a1", "c", "b1"}));
}

TEST(Clean, InterDropsBothSides) {
    PlacedProvider p;
    const Similarity sim(p);
    const std::vector<TopicKeywords> topics{{"t1", {"a1", "c"}}, {"t2", {"a2", "b1"}}, {"t3", {"a3"}}};
    const auto r = inter_cluster_clean(topics, CleanConfig{}, sim);
    EXPECT_EQ(r.topics[0].keywords, (std::vector<std::string>{"c"}));
    EXPECT_EQ(r.topics[1].keywords, (std::vector<std::string>{"b1"}));
    EXPECT_TRUE(r.topics[2].keywords.empty());
    EXPECT_EQ(r.emptied, (std::vector<std::string>{"t3"}));
}

TEST(Clean, RandomizedPostConditionsAndIdempotence) {
    const auto provider = builtin_deterministic_provider(256, 17);
    EmbeddingCache cache;
    const Similarity sim(*provider, &cache);
    const CleanConfig cfg;
    std::mt19937_64 rng(12);
    for (int round = 0; round < 20; ++round) {
        const auto kws = keyword_list(rng, 30, 12);
        const auto once = intra_cluster_clean(kws, cfg, sim);
        if (once.size() > 1) {
            EXPECT_LE(oracle::max_pair_similarity(*provider, once), cfg.delta_intra + 1e-12);
        }
        EXPECT_EQ(intra_cluster_clean(once, cfg, sim), once);

        std::vector<TopicKeywords> topics;
        for (int t = 0; t < 4; ++t) topics.push_back({"t" + std::to_string(t), keyword_list(rng, 8, 20)});
        const auto inter = inter_cluster_clean(topics, cfg, sim);
        std::vector<std::vector<std::string>> lists;
        for (const auto& t : inter.topics) lists.push_back(t.keywords);
        EXPECT_LE(oracle::max_cross_similarity(*provider, lists), cfg.delta_e + 1e-12);
        EXPECT_EQ(inter_cluster_clean(inter.topics, cfg, sim).topics, inter.topics);
    }
}

TEST(Clean, TaxonomyCleanBumpsVersionAndSkipsL4) {
    PlacedProvider p;
    const Similarity sim(p);
    Taxonomy t;
    t.version = 3;
    GranularTopic a{"a.neg", "a", "h", "c", Polarity::Negative, {"a1", "a2", "c"}, TopicLevel::L3, std::nullopt};
    GranularTopic b{"b.neg", "b", "h", "c", Polarity::Negative, {"b1", "a3"}, TopicLevel::L3, std::nullopt};
    GranularTopic l4{"l4.neg", "l4", "h", "c", Polarity::Negative, {"a4"}, TopicLevel::L4, std::string("a.neg")};
    t.topics = {a, b, l4};
    const auto r = clean_taxonomy(t, CleanConfig{}, sim);
    EXPECT_EQ(r.taxonomy.version, 4u);
    EXPECT_EQ(r.removed_intra, 1u);
    EXPECT_EQ(r.removed_inter, 2u);
    EXPECT_EQ(r.taxonomy.topics[0].keywords, (std::vector<std::string>{"c"}));
    EXPECT_EQ(r.taxonomy.topics[1].keywords, (std::vector<std::string>{"b1"}));
    EXPECT_EQ(r.taxonomy.topics[2].keywords, (std::vector<std::string>{"a4"}));
}

TEST(Report, CountsAndExclusivity) {
    PlacedProvider p;
    const Similarity sim(p);
    Taxonomy t;
    t.topics = {
        GranularTopic{"a1.neg", "a1", "h1", "c1", Polarity::Negative, {"a2"}, TopicLevel::L3, std::nullopt},
        GranularTopic{"a3.neg", "a3", "h1", "c1", Polarity::Negative, {"b1"}, TopicLevel::L3, std::nullopt},
        GranularTopic{"c.neg", "c", "h2", "c1", Polarity::Negative, {}, TopicLevel::L3, std::nullopt},
    };
    const auto r = taxonomy_quality_report(t, CleanConfig{}, sim);
    EXPECT_EQ(r.l3_topics, 3u);
    EXPECT_EQ(r.hinge_topics, 2u);
    EXPECT_EQ(r.coarse_topics, 1u);
    EXPECT_EQ(r.l3_pairs, 3u);
    EXPECT_EQ(r.similar_name_pairs, 1u);  // a1 / a3
    EXPECT_NEAR(r.exclusivity, 2.0 / 3.0, 1e-12);
    EXPECT_EQ(r.empty_topics, (std::vector<std::string>{"c.neg"}));
    std::size_t binned = 0;
    for (auto n : r.keyword_overlap_histogram) binned += n;
    EXPECT_EQ(binned, 2u);
    const Json j = r;
    EXPECT_TRUE(j.contains("exclusivity_proxy"));
}

TEST(Clean, ConfigValidation) {
    CleanConfig c;
    c.delta_e = 1.0;
    EXPECT_THROW(c.validate(), ValidationError);
    ClusterConfig k;
    k.sim_threshold = 0.0;
    EXPECT_THROW(k.validate(), ValidationError);
}
