#include <gtest/gtest.h>

#include <random>

#include "reviewlens/error.hpp"
#include "reviewlens/segmentation.hpp"
#include "reviewlens/text.hpp"
#include "synthetic.hpp"

using namespace reviewlens;

namespace {

std::vector<std::string> texts(const std::vector<Segment>& segs) {
    std::vector<std::string> out;
    for (const auto& s : segs) out.push_back(s.text);
    return out;
}

std::vector<std::string> texts(const std::vector<TextPiece>& pieces) {
    std::vector<std::string> out;
    for (const auto& p : pieces) out.push_back(p.text);
    return out;
}

using V = std::vector<std::string>;

}  // namespace

TEST(Segmentation, SentencesOnPunctuation) {
    const SegmenterConfig cfg;
    EXPECT_EQ(texts(split_sentences("Not even close. not even close to the same as the image.", cfg)),
              (V{"Not even close", "not even close to the same as the image"}));
}

TEST(Segmentation, GoldenApparelReview) {
    const SegmenterConfig cfg;
    const Review r{"r002",
                   "Color is GREAT! Have to battle the sleeve tightness. Length is great. Warmth is there. "
                   "Just very tight in the arm area. Not shoulders but sleeves",
                   std::nullopt};
    EXPECT_EQ(texts(segment_review(r, cfg)),
              (V{"Color is GREAT", "Have to battle the sleeve tightness", "Length is great", "Warmth is there",
                 "Just very tight in the arm area", "Not shoulders", "sleeves"}));
}

TEST(Segmentation, SentenceSplitOnBut) {
    const SegmenterConfig cfg;
    EXPECT_EQ(texts(split_sentences("Not shoulders but sleeves", cfg)), (V{"Not shoulders", "sleeves"}));
    EXPECT_EQ(texts(split_sentences("Not shoulders BUT sleeves", cfg)), (V{"Not shoulders", "sleeves"}));
}

TEST(Segmentation, ButIsWholeWordOnly) {
    const SegmenterConfig cfg;
    EXPECT_EQ(texts(split_sentences("peanut butter rebuttal", cfg)), (V{"peanut butter rebuttal"}));
    EXPECT_EQ(texts(split_sentences("good,but small", cfg)), (V{"good,", "small"}));
}

TEST(Segmentation, EmptyAndDelimiterOnlyInput) {
    const SegmenterConfig cfg;
    EXPECT_TRUE(split_sentences("", cfg).empty());
    EXPECT_TRUE(segment_review(Review{"r", ".....", std::nullopt}, cfg).empty());
    EXPECT_EQ(texts(split_sentences("Wait... what?!", cfg)), (V{"Wait", "what"}));
}

TEST(Segmentation, PhraseGuardKeepsShortPiecesTogether) {
    const SegmenterConfig cfg;
    // "replied fast" has only two words, so the comma does not split.
    EXPECT_EQ(split_phrases("replied fast, immediate response arrived", cfg),
              (V{"replied fast, immediate response arrived"}));
    EXPECT_EQ(split_phrases("nice, soft", cfg), (V{"nice, soft"}));
}

TEST(Segmentation, PhraseSplitWhenEveryPieceIsLongEnough) {
    const SegmenterConfig cfg;
    EXPECT_EQ(split_phrases("the zipper sticks badly and the seams ripped open", cfg),
              (V{"the zipper sticks badly", "the seams ripped open"}));
    EXPECT_EQ(split_phrases("arrived three days late; the box was crushed & the lid cracked open", cfg),
              (V{"arrived three days late", "the box was crushed", "the lid cracked open"}));
}

TEST(Segmentation, AndIsWholeWordOnly) {
    const SegmenterConfig cfg;
    EXPECT_EQ(split_phrases("the handle is sturdy and the band is wide", cfg),
              (V{"the handle is sturdy", "the band is wide"}));
    EXPECT_EQ(split_phrases("the sandals are handy brand new", cfg), (V{"the sandals are handy brand new"}));
}

TEST(Segmentation, GuardThresholdIsConfigurable) {
    SegmenterConfig cfg;
    cfg.min_phrase_words = 1;
    EXPECT_EQ(split_phrases("replied fast, immediate response arrived", cfg),
              (V{"replied fast", "immediate response arrived"}));
}

TEST(Segmentation, SingleSentenceReview) {
    const SegmenterConfig cfg;
    const auto segs = segment_review(Review{"r", "  works exactly as described  ", std::nullopt}, cfg);
    ASSERT_EQ(segs.size(), 1u);
    EXPECT_EQ(segs[0].text, "works exactly as described");
    EXPECT_EQ(segs[0].span, (CharSpan{2, 28}));
    EXPECT_FALSE(segs[0].polarity.has_value());
}

TEST(Segmentation, SpansPointIntoReviewText) {
    const SegmenterConfig cfg;
    const Review r{"r", "Color is GREAT! Have to battle the sleeve tightness. Not shoulders but sleeves", std::nullopt};
    for (const auto& s : segment_review(r, cfg)) {
        EXPECT_EQ(r.text.substr(s.span.start, s.span.size()), s.text);
        EXPECT_EQ(s.review_id, "r");
    }
}

TEST(Segmentation, ReconstructionOnRandomText) {
    const SegmenterConfig cfg;
    std::mt19937_64 rng(21);
    for (int i = 0; i < 500; ++i) {
        auto body = synth::random_text(rng, 0, 120);
        if (i % 7 == 0) body += " and then but also";
        const Review r{"r", body, std::nullopt};
        std::size_t cursor = 0;
        for (const auto& s : segment_review(r, cfg)) {
            ASSERT_GE(s.span.start, cursor);
            ASSERT_EQ(r.text.substr(s.span.start, s.span.size()), s.text);
            // The gap holds only whitespace and delimiters.
            std::string gap = r.text.substr(cursor, s.span.start - cursor);
            for (const auto& d : cfg.sentence_delimiters) {
                for (auto p = text::lower(gap).find(d); p != std::string::npos; p = text::lower(gap).find(d)) {
                    gap.erase(p, d.size());
                }
            }
            for (const auto& d : cfg.phrase_delimiters) {
                for (auto p = text::lower(gap).find(d); p != std::string::npos; p = text::lower(gap).find(d)) {
                    gap.erase(p, d.size());
                }
            }
            EXPECT_TRUE(text::trim(gap).empty()) << "gap '" << gap << "' in '" << body << "'";
            cursor = s.span.end;
        }
    }
}

TEST(Segmentation, SegmentingASegmentIsIdempotent) {
    const SegmenterConfig cfg;
    const Review r{"r", "Just very tight in the arm area", std::nullopt};
    const auto once = segment_review(r, cfg);
    ASSERT_EQ(once.size(), 1u);
    EXPECT_EQ(texts(segment_review(Review{"r", once[0].text, std::nullopt}, cfg)), texts(once));
}

TEST(Segmentation, ConfigValidation) {
    SegmenterConfig cfg;
    cfg.min_phrase_words = 0;
    EXPECT_THROW(cfg.validate(), ValidationError);
    cfg = SegmenterConfig{};
    cfg.sentence_delimiters.clear();
    EXPECT_THROW(cfg.validate(), ValidationError);
}
