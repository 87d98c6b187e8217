#include <benchmark/benchmark.h>

#include <random>

#include "reviewlens/embedding.hpp"
#include "reviewlens/matching.hpp"
#include "reviewlens/segmentation.hpp"
#include "reviewlens/taxonomy_builder.hpp"

using namespace reviewlens;

namespace {

const char* kReview =
    "Color is GREAT! Have to battle the sleeve tightness. Length is great. Warmth is there. "
    "Just very tight in the arm area. Not shoulders but sleeves, and the zipper sticks badly and the seams ripped open.";

std::string word(std::mt19937_64& rng) {
    static const char* syll[] = {"ka", "lo", "mi", "ne", "pu", "ra", "si", "to", "vu", "ze"};
    std::string w;
    for (int i = 0; i < 3; ++i) w += syll[rng() % 10];
    return w;
}

std::string phrase(std::mt19937_64& rng, int words) {
    std::string s;
    for (int i = 0; i < words; ++i) s += (i ? " " : "") + word(rng);
    return s;
}

Taxonomy random_taxonomy(std::size_t topics, std::size_t keywords, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Taxonomy t;
    for (std::size_t i = 0; i < topics; ++i) {
        GranularTopic g;
        g.name = phrase(rng, 2) + " " + std::to_string(i);
        g.polarity = Polarity::Negative;
        g.id = topic_slug(g.name, g.polarity);
        g.hinge = "h";
        g.coarse = "c";
        for (std::size_t k = 0; k < keywords; ++k) g.keywords.push_back(phrase(rng, 3));
        t.topics.push_back(std::move(g));
    }
    return t;
}

}  // namespace

static void BM_Segment(benchmark::State& state) {
    const SegmenterConfig cfg;
    const Review r{"r", kReview, std::nullopt};
    for (auto _ : state) benchmark::DoNotOptimize(segment_review(r, cfg));
}
BENCHMARK(BM_Segment);

static void BM_Embed(benchmark::State& state) {
    const auto p = builtin_deterministic_provider(static_cast<std::size_t>(state.range(0)), 17);
    for (auto _ : state) benchmark::DoNotOptimize(p->embed("just very tight in the arm area"));
}
BENCHMARK(BM_Embed)->Arg(64)->Arg(256)->Arg(1024);

static void BM_SimSTCached(benchmark::State& state) {
    const auto p = builtin_deterministic_provider(256, 17);
    EmbeddingCache cache;
    const Similarity sim(*p, &cache);
    for (auto _ : state) benchmark::DoNotOptimize(sim("zipper sticks badly", "the zipper gets stuck"));
}
BENCHMARK(BM_SimSTCached);

static void BM_MatchTopic(benchmark::State& state) {
    const auto tax = random_taxonomy(static_cast<std::size_t>(state.range(0)), 10, 3);
    const auto p = builtin_deterministic_provider(256, 17);
    EmbeddingCache cache;
    const TopicMatcher matcher(tax, MatchConfig{}, Similarity(*p, &cache));
    const Segment seg{"r", "the zipper sticks badly", {0, 23}, Polarity::Negative, 0, 0.9};
    for (auto _ : state) benchmark::DoNotOptimize(matcher.match(seg));
}
BENCHMARK(BM_MatchTopic)->Arg(10)->Arg(100);

static void BM_InterClean(benchmark::State& state) {
    std::mt19937_64 rng(5);
    std::vector<TopicKeywords> lists(8);
    for (std::size_t i = 0; i < lists.size(); ++i) {
        lists[i].topic = "t" + std::to_string(i);
        for (int k = 0; k < state.range(0) / 8; ++k) lists[i].keywords.push_back(phrase(rng, 2));
    }
    const auto p = builtin_deterministic_provider(256, 17);
    EmbeddingCache cache;
    const Similarity sim(*p, &cache);
    for (auto _ : state) benchmark::DoNotOptimize(inter_cluster_clean(lists, CleanConfig{}, sim));
}
BENCHMARK(BM_InterClean)->Arg(80)->Arg(200);
BENCHMARK_MAIN();
