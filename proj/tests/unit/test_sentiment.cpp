#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "reviewlens/error.hpp"
#include "reviewlens/sentiment.hpp"

using namespace reviewlens;

namespace {

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
    const auto p = std::filesystem::temp_directory_path() / ("reviewlens_sent_" + name);
    std::ofstream(p) << content;
    return p;
}

class ThrowingClassifier final : public SentimentClassifier {
public:
    SentimentScores score(std::string_view) const override { throw std::runtime_error("model offline"); }
};

}  // namespace

TEST(Sentiment, DecisionTable) {
    const SentimentConfig cfg;  // delta_p 0.7
    EXPECT_EQ(decide_polarity({0.0, 0.0}, cfg), Polarity::Neutral);
    EXPECT_EQ(decide_polarity({0.69, 0.69}, cfg), Polarity::Neutral);
    EXPECT_EQ(decide_polarity({0.7, 0.0}, cfg), Polarity::Positive);
    EXPECT_EQ(decide_polarity({0.0, 0.7}, cfg), Polarity::Negative);
    EXPECT_EQ(decide_polarity({0.9, 0.8}, cfg), Polarity::Positive);
    EXPECT_EQ(decide_polarity({0.8, 0.9}, cfg), Polarity::Negative);
    EXPECT_EQ(decide_polarity({0.1, 0.75}, cfg), Polarity::Negative);
}

TEST(Sentiment, ExactTieGoesNegative) {
    const SentimentConfig cfg;
    EXPECT_EQ(decide_polarity({0.8, 0.8}, cfg), Polarity::Negative);
    EXPECT_EQ(decide_polarity({1.0, 1.0}, cfg), Polarity::Negative);
}

TEST(Sentiment, LexiconSquash) {
    const LexiconClassifier unit({{"great", 0.9}}, 1.0);
    const auto s = unit.score("Length is great");
    EXPECT_NEAR(s.p, 1.0 - std::exp(-0.9), 1e-12);
    EXPECT_EQ(s.n, 0.0);
    // At gain 1 a single strong word stays below 0.7.
    EXPECT_EQ(decide_polarity(s, SentimentConfig{}), Polarity::Neutral);

    const LexiconClassifier calibrated({{"great", 0.9}}, 2.5);
    const auto c = calibrated.score("Length is great");
    EXPECT_NEAR(c.p, 1.0 - std::exp(-2.25), 1e-12);
    EXPECT_EQ(decide_polarity(c, SentimentConfig{}), Polarity::Positive);
}

TEST(Sentiment, HeadsAreIndependent) {
    const LexiconClassifier clf({{"great", 0.9}, {"tight", -0.6}}, 2.5);
    const auto s = clf.score("great color but tight");
    EXPECT_NEAR(s.p, 1.0 - std::exp(-2.25), 1e-12);
    EXPECT_NEAR(s.n, 1.0 - std::exp(-1.5), 1e-12);
    EXPECT_GT(s.p + s.n, 1.0);
}

TEST(Sentiment, NegationFlipsNextBearingToken) {
    const LexiconClassifier clf({{"good", 0.7}, {"bad", -0.8}}, 2.5);
    const auto a = clf.score("not good");
    EXPECT_EQ(a.p, 0.0);
    EXPECT_NEAR(a.n, 1.0 - std::exp(-1.75), 1e-12);
    // Neutral words in between do not consume the negation.
    const auto b = clf.score("never a very bad day");
    EXPECT_NEAR(b.p, 1.0 - std::exp(-2.0), 1e-12);
    EXPECT_EQ(b.n, 0.0);
    // Only the first bearing token flips.
    const auto c = clf.score("no good good");
    EXPECT_NEAR(c.p, 1.0 - std::exp(-1.75), 1e-12);
    EXPECT_NEAR(c.n, 1.0 - std::exp(-1.75), 1e-12);
    // Negation with nothing to flip has no effect.
    const auto d = clf.score("good, not");
    EXPECT_NEAR(d.p, 1.0 - std::exp(-1.75), 1e-12);
}

TEST(Sentiment, CaseInsensitive) {
    const LexiconClassifier clf({{"great", 0.9}}, 2.5);
    EXPECT_EQ(clf.score("Color is GREAT").p, clf.score("color is great").p);
}

TEST(Sentiment, ScoresStayInUnitInterval) {
    const LexiconClassifier clf({{"great", 1.0}}, 10.0);
    std::string many;
    for (int i = 0; i < 200; ++i) many += "great ";
    const auto s = clf.score(many);
    EXPECT_LE(s.p, 1.0);
    EXPECT_GE(s.p, 0.0);
}

TEST(Sentiment, ClassifySegmentFillsFields) {
    const LexiconClassifier clf({{"tight", -0.6}}, 2.5);
    Segment seg{"r", "Just very tight in the arm area", {0, 31}, std::nullopt, 0, 0};
    const auto out = classify_segment(seg, clf, SentimentConfig{});
    EXPECT_EQ(out.polarity, Polarity::Negative);
    EXPECT_NEAR(out.neg_score, 1.0 - std::exp(-1.5), 1e-12);
    EXPECT_EQ(out.pos_score, 0.0);
}

TEST(Sentiment, ClassifierFailureNamesSegment) {
    Segment seg{"r42", "whatever", {3, 11}, std::nullopt, 0, 0};
    try {
        classify_segment(seg, ThrowingClassifier{}, SentimentConfig{});
        FAIL();
    } catch (const DataError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("r42"), std::string::npos);
        EXPECT_NE(msg.find("[3,11)"), std::string::npos);
        EXPECT_NE(msg.find("model offline"), std::string::npos);
    }
}

TEST(Sentiment, DeltaPValidation) {
    SentimentConfig cfg;
    cfg.delta_p = 1.5;
    try {
        cfg.validate();
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.field(), "sentiment.delta_p");
    }
    cfg.delta_p = 0.0;
    EXPECT_THROW(cfg.validate(), ValidationError);
    cfg.delta_p = 1.0;
    EXPECT_NO_THROW(cfg.validate());
}

TEST(Sentiment, LexiconRejectsBadWeightsAndGain) {
    EXPECT_THROW(LexiconClassifier({{"x", 1.5}}), DataError);
    EXPECT_THROW(LexiconClassifier({{"x", 0.5}}, 0.0), ValidationError);
}

TEST(Sentiment, LexiconFile) {
    const auto path = temp_file("lex.jsonl", "{\"token\":\"Great\",\"weight\":0.9}\n");
    const auto clf = lexicon_classifier(path, 2.5);
    EXPECT_NEAR(clf->score("great").p, 1.0 - std::exp(-2.25), 1e-12);
    const auto bad = temp_file("badlex.jsonl", "{\"token\":\"x\",\"weight\":\"high\"}\n");
    EXPECT_THROW(lexicon_classifier(bad), DataError);
}

TEST(Sentiment, PrecomputedScores) {
    const auto path = temp_file("scores.jsonl",
                                "{\"text\":\"Color is GREAT\",\"p\":0.95,\"n\":0.01}\n"
                                "{\"text\":\"Not shoulders\",\"p\":0.2,\"n\":0.1}\n");
    const auto clf = load_scores_classifier(path);
    const auto s = clf->score(" Color is GREAT ");
    EXPECT_EQ(s.p, 0.95);
    EXPECT_EQ(decide_polarity(clf->score("Not shoulders"), SentimentConfig{}), Polarity::Neutral);
    EXPECT_THROW(clf->score("unseen"), DataError);
    const auto bad = temp_file("badscores.jsonl", "{\"text\":\"a\",\"p\":1.2,\"n\":0}\n");
    EXPECT_THROW(load_scores_classifier(bad), DataError);
}
