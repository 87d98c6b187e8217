#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "reviewlens/config.hpp"
#include "reviewlens/error.hpp"

using namespace reviewlens;

namespace {

std::string field_of(const Json& j) {
    try {
        config_from_json(j);
    } catch (const ValidationError& e) {
        return e.field();
    }
    return "";
}

}  // namespace

TEST(Config, DefaultsAreValid) {
    const PipelineConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    EXPECT_EQ(cfg.sentiment.delta_p, 0.7);
    EXPECT_EQ(cfg.match.k, 5u);
    EXPECT_EQ(cfg.match.delta_h, 0.8);
    EXPECT_EQ(cfg.match.delta_m, 0.3);
    EXPECT_EQ(cfg.match.delta_avg, 0.5);
    EXPECT_EQ(cfg.post.exact_replace, 0.95);
    EXPECT_EQ(cfg.post.l4_topic, 0.7);
    EXPECT_EQ(cfg.post.l4_verbatim, 0.4);
    EXPECT_EQ(cfg.clean.delta_intra, 0.9);
    EXPECT_EQ(cfg.clean.delta_e, 0.85);
}

TEST(Config, OutOfRangeNamesField) {
    EXPECT_EQ(field_of(Json{{"sentiment", {{"delta_p", 1.5}}}}), "sentiment.delta_p");
    EXPECT_EQ(field_of(Json{{"match", {{"k", 0}}}}), "match.k");
    EXPECT_EQ(field_of(Json{{"post", {{"l4_verbatim", 0.9}}}}), "post.l4_verbatim");
    EXPECT_EQ(field_of(Json{{"jobs", 0}}), "jobs");
}

TEST(Config, UnknownKeysRejected) {
    EXPECT_EQ(field_of(Json{{"sentiment", {{"delta_q", 0.5}}}}), "sentiment.delta_q");
    EXPECT_EQ(field_of(Json{{"colour", 1}}), "colour");
}

TEST(Config, WrongTypeRejected) {
    EXPECT_THROW(config_from_json(Json{{"match", {{"delta_h", "high"}}}}), ValidationError);
    EXPECT_THROW(config_from_json(Json{{"segmenter", {{"sentence_delimiters", "."}}}}), ValidationError);
}

TEST(Config, RoundTrip) {
    PipelineConfig cfg;
    cfg.match.k = 3;
    cfg.sentiment_source.lexicon_gain = 2.5;
    cfg.templates.topic_q = "topics please : {review}";
    const auto back = config_from_json(config_to_json(cfg));
    EXPECT_EQ(back.match.k, 3u);
    EXPECT_EQ(back.sentiment_source.lexicon_gain, 2.5);
    EXPECT_EQ(back.templates.topic_q, "topics please : {review}");
    EXPECT_EQ(config_to_json(back), config_to_json(cfg));
}

TEST(Config, RelativePathsResolveAgainstConfigDir) {
    const auto dir = std::filesystem::temp_directory_path() / "reviewlens_cfg";
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "lex.jsonl") << "{\"token\":\"great\",\"weight\":0.9}\n";
    std::ofstream(dir / "cfg.json") << R"({"sentiment": {"lexicon": "lex.jsonl", "lexicon_gain": 2.5}})";
    const auto cfg = load_config(dir / "cfg.json");
    ASSERT_TRUE(cfg.sentiment_source.lexicon);
    EXPECT_EQ(*cfg.sentiment_source.lexicon, dir / "lex.jsonl");
    EXPECT_GT(make_classifier(cfg)->score("great").p, 0.8);
}

TEST(Config, ShippedDefaultLoads) {
    const auto cfg = load_config(REVIEWLENS_DATA_DIR "/default.json");
    EXPECT_EQ(cfg.sentiment_source.lexicon_gain, 2.5);
    EXPECT_NO_THROW(make_classifier(cfg));
    EXPECT_EQ(make_provider(cfg)->dim(), 256u);
}

TEST(Config, ClassifierNeedsASource) {
    EXPECT_THROW(make_classifier(PipelineConfig{}), ValidationError);
}

TEST(Config, BadEmbedderSpec) {
    EXPECT_THROW(config_from_json(Json{{"embedder", "builtin:4:1"}}), ValidationError);
}

TEST(Config, MissingFileIsDataError) {
    EXPECT_THROW(load_config("/nonexistent/cfg.json"), DataError);
}
