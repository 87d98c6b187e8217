#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "reviewlens/model.hpp"

namespace reviewlens {

/// Delimiter tokens made only of ASCII letters ("but", "and") match as whole,
/// case-insensitive words; anything else matches literally.
struct SegmenterConfig {
    std::vector<std::string> sentence_delimiters{".", "!", "?", "but"};
    std::vector<std::string> phrase_delimiters{",", ";", "&", "and"};
    std::size_t min_phrase_words = 2;

    /// Throws ValidationError naming the offending field.
    void validate() const;
};

/// A trimmed, non-empty piece of text and its byte span in the text it was cut from.
struct TextPiece {
    std::string text;
    CharSpan span;

    bool operator==(const TextPiece&) const = default;
};

std::vector<TextPiece> split_sentences(std::string_view text, const SegmenterConfig& cfg);

/// Splits a sentence into phrases, unless any resulting phrase would have
/// min_phrase_words words or fewer, in which case the sentence stays whole.
std::vector<std::string> split_phrases(std::string_view sentence, const SegmenterConfig& cfg);
std::vector<TextPiece> split_phrase_pieces(std::string_view sentence, const SegmenterConfig& cfg);

/// Sentences, then phrases, in source order with spans into `r.text`.
/// Polarity fields are left unset.
std::vector<Segment> segment_review(const Review& r, const SegmenterConfig& cfg);

}  // namespace reviewlens
