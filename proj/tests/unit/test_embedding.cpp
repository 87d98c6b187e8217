#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <thread>

#include "oracle.hpp"
#include "reviewlens/embedding.hpp"
#include "reviewlens/error.hpp"
#include "synthetic.hpp"

using namespace reviewlens;

namespace {

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
    const auto p = std::filesystem::temp_directory_path() / ("reviewlens_emb_" + name);
    std::ofstream(p) << content;
    return p;
}

// Returns fixed vectors for a handful of strings.
class TableProvider final : public EmbeddingProvider {
public:
    std::size_t dim() const noexcept override { return 2; }
    EmbeddingVector embed(std::string_view t) const override {
        if (t == "x") return EmbeddingVector({1, 0});
        if (t == "y") return EmbeddingVector({0, 3});
        if (t == "zero") return EmbeddingVector({0, 0});
        return EmbeddingVector({1, 1});
    }
};

}  // namespace

TEST(Embedding, RejectsNonFinite) {
    EXPECT_THROW(EmbeddingVector({1.0, std::nan("")}), EmbeddingError);
    EXPECT_THROW(EmbeddingVector({INFINITY}), EmbeddingError);
}

TEST(Embedding, SelfSimilarityIsOne) {
    const auto p = builtin_deterministic_provider(256, 17);
    EXPECT_NEAR(sim_st("size too small", "size too small", *p, nullptr), 1.0, 1e-9);
}

TEST(Embedding, OrthogonalVectorsScoreZero) {
    TableProvider p;
    EXPECT_NEAR(sim_st("x", "y", p, nullptr), 0.0, 1e-9);
}

TEST(Embedding, ZeroVectorIsDegenerate) {
    TableProvider p;
    EXPECT_THROW(sim_st("x", "zero", p, nullptr), EmbeddingError);
}

TEST(Embedding, EmptyTextIsAnError) {
    const auto p = builtin_deterministic_provider(64, 1);
    EXPECT_THROW(p->embed(""), EmbeddingError);
    EXPECT_THROW(p->embed("   "), EmbeddingError);
}

TEST(Embedding, DimensionBelowEightRejected) {
    EXPECT_THROW(builtin_deterministic_provider(7, 1), ValidationError);
}

TEST(Embedding, WordOrderVariantCloserThanUnrelatedText) {
    const auto p = builtin_deterministic_provider(256, 17);
    const double reordered = sim_st("size too small", "too small size", *p, nullptr);
    const double unrelated = sim_st("size too small", "battery drains fast", *p, nullptr);
    EXPECT_GT(reordered, unrelated);
}

TEST(Embedding, EqualParametersAgree) {
    const auto a = builtin_deterministic_provider(128, 5);
    const auto b = builtin_deterministic_provider(128, 5);
    const auto c = builtin_deterministic_provider(128, 6);
    EXPECT_EQ(a->embed("zipper sticks"), b->embed("zipper sticks"));
    EXPECT_NE(a->embed("zipper sticks"), c->embed("zipper sticks"));
}

TEST(Embedding, MatchesBruteForceCosine) {
    const auto p = builtin_deterministic_provider(256, 17);
    std::mt19937_64 rng(3);
    for (int i = 0; i < 200; ++i) {
        const auto a = synth::random_text(rng, 1, 40);
        const auto b = synth::random_text(rng, 1, 40);
        EXPECT_NEAR(sim_st(a, b, *p, nullptr), oracle::cosine(*p, a, b), 1e-9);
    }
}

TEST(Embedding, SpecParsing) {
    EXPECT_EQ(provider_from_spec("builtin:64:9")->dim(), 64u);
    EXPECT_THROW(provider_from_spec("builtin:64"), ValidationError);
    EXPECT_THROW(provider_from_spec("openai:64:1"), ValidationError);
    EXPECT_THROW(provider_from_spec("builtin:x:1"), ValidationError);
}

TEST(Embedding, CacheIsTransparent) {
    const auto p = builtin_deterministic_provider(256, 17);
    EmbeddingCache cache;
    const Similarity cached(*p, &cache), plain(*p);
    std::mt19937_64 rng(11);
    for (int i = 0; i < 100; ++i) {
        const auto a = synth::random_text(rng, 1, 30);
        const auto b = synth::random_text(rng, 1, 30);
        EXPECT_EQ(cached(a, b), plain(a, b));
        EXPECT_EQ(cached(a, b), plain(a, b));  // second call served from the cache
    }
    EXPECT_GT(cache.hits(), 0u);
}

TEST(Embedding, CacheKeyIgnoresSurroundingWhitespace) {
    const auto p = builtin_deterministic_provider(64, 1);
    EmbeddingCache cache;
    const Similarity sim(*p, &cache);
    sim.unit("zipper sticks");
    sim.unit("  zipper sticks\n");
    EXPECT_EQ(cache.size(), 1u);
    EXPECT_EQ(cache.hits(), 1u);
}

TEST(Embedding, ConcurrentCacheUse) {
    const auto p = builtin_deterministic_provider(128, 2);
    EmbeddingCache cache;
    const Similarity sim(*p, &cache);
    std::vector<std::string> texts;
    std::mt19937_64 rng(5);
    for (int i = 0; i < 50; ++i) texts.push_back(synth::random_text(rng, 3, 20));
    std::vector<std::vector<double>> results(4);
    {
        std::vector<std::jthread> pool;
        for (int t = 0; t < 4; ++t) {
            pool.emplace_back([&, t] {
                for (std::size_t i = 0; i + 1 < texts.size(); ++i) results[t].push_back(sim(texts[i], texts[i + 1]));
            });
        }
    }
    for (int t = 1; t < 4; ++t) EXPECT_EQ(results[t], results[0]);
}

TEST(Embedding, PrecomputedLookup) {
    const auto path = temp_file("ok.jsonl",
                                "{\"text\":\"great responsiveness\",\"vec\":[3,4]}\n"
                                "{\"text\":\"fast reply\",\"vec\":[4,3]}\n");
    const auto p = load_precomputed_provider(path);
    EXPECT_EQ(p->dim(), 2u);
    EXPECT_EQ(p->embed("great responsiveness"), EmbeddingVector({3, 4}));
    EXPECT_NEAR(sim_st("great responsiveness", "fast reply", *p, nullptr), 24.0 / 25.0, 1e-12);
    try {
        p->embed("unknown text");
        FAIL();
    } catch (const EmbeddingError& e) {
        EXPECT_NE(std::string(e.what()).find("unknown text"), std::string::npos);
    }
}

TEST(Embedding, PrecomputedDimensionMismatch) {
    const auto path = temp_file("mismatch.jsonl",
                                "{\"text\":\"a\",\"vec\":[1,2]}\n"
                                "{\"text\":\"b\",\"vec\":[1,2,3]}\n");
    EXPECT_THROW(load_precomputed_provider(path), DataError);
}
