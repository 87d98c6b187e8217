#include <gtest/gtest.h>

#include <map>
#include <random>

#include "reviewlens/adapter.hpp"
#include "reviewlens/error.hpp"
#include "synthetic.hpp"

using namespace reviewlens;

namespace {

// Replays answers keyed by prompt; unknown prompts get `fallback`.
class ScriptedModel final : public GenerativeModel {
public:
    ScriptedModel(std::map<std::string, std::string> script, std::string fallback = "")
        : script_(std::move(script)), fallback_(std::move(fallback)) {}
    std::string generate(std::string_view prompt) override {
        const auto it = script_.find(std::string(prompt));
        return it == script_.end() ? fallback_ : it->second;
    }

private:
    std::map<std::string, std::string> script_;
    std::string fallback_;
};

// Answers from a labelled record, the way a perfectly trained model would.
class OracleModel final : public GenerativeModel {
public:
    OracleModel(const LabelledRecord& rec, const PromptTemplates& tpl) {
        for (const auto& p : serialize_training_pairs(rec, tpl)) answers_[p.prompt] = p.target;
    }
    std::string generate(std::string_view prompt) override { return answers_.at(std::string(prompt)); }

private:
    std::map<std::string, std::string> answers_;
};

std::string fake(const std::string& mode) { return std::string(FAKE_MODEL) + " " + mode; }

bool has_warning(const RawBundle& b, const std::string& needle) {
    for (const auto& w : b.warnings) {
        if (w.find(needle) != std::string::npos) return true;
    }
    return false;
}

}  // namespace

TEST(Parsers, TopicList) {
    const auto strict = parse_topic_list("[color, arm fit]");
    ASSERT_TRUE(strict);
    EXPECT_EQ(strict->items, (std::vector<std::string>{"color", "arm fit"}));
    EXPECT_FALSE(strict->lenient);
    EXPECT_TRUE(parse_topic_list("[]")->items.empty());

    const auto loose = parse_topic_list("color, \"arm fit\"");
    ASSERT_TRUE(loose);
    EXPECT_TRUE(loose->lenient);
    EXPECT_EQ(loose->items, (std::vector<std::string>{"color", "arm fit"}));

    EXPECT_FALSE(parse_topic_list("???"));
    EXPECT_FALSE(parse_topic_list(""));
}

TEST(Parsers, Polarity) {
    bool lenient = true;
    EXPECT_EQ(parse_polarity_answer("negative", &lenient), Polarity::Negative);
    EXPECT_FALSE(lenient);
    EXPECT_EQ(parse_polarity_answer(" [Positive]. ", &lenient), Polarity::Positive);
    EXPECT_TRUE(lenient);
    EXPECT_FALSE(parse_polarity_answer("neutral"));
    EXPECT_FALSE(parse_polarity_answer("mostly positive"));
}

TEST(Parsers, Verbatims) {
    EXPECT_EQ(*parse_verbatims("Color is GREAT | love it"), (std::vector<std::string>{"Color is GREAT", "love it"}));
    EXPECT_EQ(*parse_verbatims("a|b"), (std::vector<std::string>{"a|b"}));
    EXPECT_FALSE(parse_verbatims("  "));
}

TEST(Inference, MakesTwoNPlusOneCalls) {
    const PromptTemplates tpl;
    std::mt19937_64 rng(2);
    for (std::size_t n = 0; n <= 8; ++n) {
        const auto rec = synth::random_record(rng, n, "r");
        OracleModel inner(rec, tpl);
        CountingModel counted(inner);
        const auto bundle = run_inference(rec.review, counted, tpl);
        EXPECT_EQ(counted.calls(), 2 * n + 1);
        ASSERT_EQ(bundle.topics.size(), n);
        for (std::size_t i = 0; i < n; ++i) {
            EXPECT_EQ(bundle.topics[i].name, rec.insights[i].topic);
            EXPECT_EQ(bundle.topics[i].polarity, rec.insights[i].polarity);
            EXPECT_EQ(bundle.topics[i].verbatims, rec.insights[i].verbatims);
        }
        EXPECT_TRUE(bundle.warnings.empty());
    }
}

TEST(Inference, DropsTopicsWithBadAnswers) {
    const PromptTemplates tpl;
    const Review r{"r9", "some review", std::nullopt};
    ScriptedModel m({{tpl.topic_prompt(r.text), "[a, b, c]"},
                     {tpl.polarity_prompt(r.text, "a"), "positive"},
                     {tpl.polarity_prompt(r.text, "b"), "unsure"},
                     {tpl.polarity_prompt(r.text, "c"), "negative"},
                     {tpl.verbatim_prompt(r.text, "a", Polarity::Positive), "x"},
                     {tpl.verbatim_prompt(r.text, "c", Polarity::Negative), ""}});
    const auto b = run_inference(r, m, tpl);
    ASSERT_EQ(b.topics.size(), 1u);
    EXPECT_EQ(b.topics[0], (RawTopic{"a", Polarity::Positive, {"x"}}));
    EXPECT_TRUE(has_warning(b, "dropped topic 'b'"));
    EXPECT_TRUE(has_warning(b, "dropped topic 'c'"));
    EXPECT_TRUE(has_warning(b, "review r9"));
}

TEST(Inference, UnparseableTopicListEmptiesBundle) {
    ScriptedModel m({}, "???");
    const auto b = run_inference(Review{"r", "t", std::nullopt}, m, PromptTemplates{});
    EXPECT_TRUE(b.topics.empty());
    ASSERT_EQ(b.warnings.size(), 1u);
}

TEST(Inference, BundleJsonRoundTrip) {
    const RawBundle b{Review{"r", "t", std::nullopt}, {RawTopic{"a", Polarity::Negative, {"v1", "v2"}}}, {"w"}};
    const Json j = b;
    EXPECT_EQ(j.get<RawBundle>(), b);
}

TEST(RuleAdapter, AnswersEveryPhaseFromSegmentNet) {
    const auto corpus = synth::planted_corpus(30, 5, 11);
    const auto provider = builtin_deterministic_provider(256, 17);
    const LexiconClassifier clf(corpus.lexicon, 2.5);
    const SegmentNet net(corpus.taxonomy, SegmenterConfig{}, SentimentConfig{}, MatchConfig{}, clf,
                         Similarity(*provider));
    const PromptTemplates tpl;
    RuleBasedAdapter adapter(net, tpl);
    for (const auto& review : corpus.reviews) {
        const auto expected = net.label(review);
        CountingModel counted(adapter);
        const auto b = run_inference(review, counted, tpl);
        EXPECT_EQ(counted.calls(), 2 * expected.insights.size() + 1);
        ASSERT_EQ(b.topics.size(), expected.insights.size());
        for (std::size_t i = 0; i < b.topics.size(); ++i) {
            EXPECT_EQ(b.topics[i].name, expected.insights[i].topic);
            EXPECT_EQ(b.topics[i].polarity, expected.insights[i].polarity);
            EXPECT_EQ(b.topics[i].verbatims, expected.insights[i].verbatims);
        }
    }
    EXPECT_THROW(adapter.generate("tell me a joke"), DataError);
}

TEST(RuleAdapter, BatchIsOrderedAndJobIndependent) {
    const auto corpus = synth::planted_corpus(40, 4, 13);
    const auto provider = builtin_deterministic_provider(256, 17);
    const LexiconClassifier clf(corpus.lexicon, 2.5);
    const SegmentNet net(corpus.taxonomy, SegmenterConfig{}, SentimentConfig{}, MatchConfig{}, clf,
                         Similarity(*provider));
    const PromptTemplates tpl;
    const ModelFactory factory = [&] { return std::make_unique<RuleBasedAdapter>(net, tpl); };
    const auto one = run_inference_batch(corpus.reviews, factory, tpl, 1);
    const auto four = run_inference_batch(corpus.reviews, factory, tpl, 4);
    EXPECT_EQ(one, four);
    for (std::size_t i = 0; i < one.size(); ++i) EXPECT_EQ(one[i].review.id, corpus.reviews[i].id);
}

TEST(ExecModelTest, SpeaksLineProtocol) {
    ExecModel m(fake("ok"));
    const auto b = run_inference(Review{"r", "anything", std::nullopt}, m, PromptTemplates{});
    ASSERT_EQ(b.topics.size(), 1u);
    EXPECT_EQ(b.topics[0], (RawTopic{"alpha topic", Polarity::Positive, {"first bit", "second bit"}}));
    EXPECT_TRUE(has_warning(b, "polarity for 'beta topic' parsed leniently"));
    EXPECT_TRUE(has_warning(b, "dropped topic 'beta topic': no verbatims"));
}

TEST(ExecModelTest, GarbageOutputGivesEmptyBundle) {
    ExecModel m(fake("garbage"));
    const auto b = run_inference(Review{"r", "anything", std::nullopt}, m, PromptTemplates{});
    EXPECT_TRUE(b.topics.empty());
    EXPECT_FALSE(b.warnings.empty());
}

TEST(ExecModelTest, CrashAndBadJsonAreDataErrors) {
    {
        ExecModel m(fake("crash"));
        EXPECT_THROW(m.generate("hello"), DataError);
    }
    {
        ExecModel m(fake("badjson"));
        EXPECT_THROW(m.generate("hello"), DataError);
    }
    {
        ExecModel m("/nonexistent/model-binary");
        EXPECT_THROW(m.generate("hello"), DataError);
    }
}

TEST(ExecModelTest, ParallelWorkersEachOwnAProcess) {
    std::vector<Review> reviews;
    for (int i = 0; i < 12; ++i) reviews.push_back(Review{"r" + std::to_string(i), "text", std::nullopt});
    const ModelFactory factory = [] { return std::make_unique<ExecModel>(fake("ok")); };
    const auto out = run_inference_batch(reviews, factory, PromptTemplates{}, 3);
    ASSERT_EQ(out.size(), reviews.size());
    for (const auto& b : out) EXPECT_EQ(b.topics.size(), 1u);
}
