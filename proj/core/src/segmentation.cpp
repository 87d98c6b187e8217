#include "reviewlens/segmentation.hpp"

#include <algorithm>

#include "reviewlens/error.hpp"
#include "reviewlens/text.hpp"

namespace reviewlens {
namespace {

bool is_word_token(std::string_view tok) {
    return !tok.empty() && std::all_of(tok.begin(), tok.end(), text::is_alpha);
}

// Non-ASCII bytes count as letters so multibyte words are never cut.
bool letter_like(char c) { return text::is_alpha(c) || static_cast<unsigned char>(c) >= 0x80; }

// Length of the longest delimiter occurring at `pos`, or 0.
std::size_t delimiter_at(std::string_view s, std::size_t pos, const std::vector<std::string>& delims) {
    std::size_t best = 0;
    for (const auto& d : delims) {
        if (d.size() <= best || pos + d.size() > s.size()) continue;
        const auto candidate = s.substr(pos, d.size());
        if (is_word_token(d)) {
            if (!text::iequals(candidate, d)) continue;
            const bool left_ok = pos == 0 || !letter_like(s[pos - 1]);
            const bool right_ok = pos + d.size() == s.size() || !letter_like(s[pos + d.size()]);
            if (left_ok && right_ok) best = d.size();
        } else if (candidate == d) {
            best = d.size();
        }
    }
    return best;
}

std::vector<TextPiece> split_on(std::string_view s, const std::vector<std::string>& delims) {
    std::vector<TextPiece> out;
    auto emit = [&](std::size_t b, std::size_t e) {
        while (b < e && text::is_space(s[b])) ++b;
        while (e > b && text::is_space(s[e - 1])) --e;
        if (e > b) out.push_back({std::string(s.substr(b, e - b)), {b, e}});
    };
    std::size_t piece_start = 0;
    std::size_t pos = 0;
    while (pos < s.size()) {
        const std::size_t len = delimiter_at(s, pos, delims);
        if (len == 0) {
            ++pos;
            continue;
        }
        emit(piece_start, pos);
        pos += len;
        piece_start = pos;
    }
    emit(piece_start, s.size());
    return out;
}

}  // namespace

void SegmenterConfig::validate() const {
    if (sentence_delimiters.empty()) throw ValidationError("segmenter.sentence_delimiters", "must not be empty");
    if (phrase_delimiters.empty()) throw ValidationError("segmenter.phrase_delimiters", "must not be empty");
    auto no_blank = [](const std::vector<std::string>& ds, const char* field) {
        for (const auto& d : ds) {
            if (d.empty()) throw ValidationError(field, "delimiters must be non-empty strings");
        }
    };
    no_blank(sentence_delimiters, "segmenter.sentence_delimiters");
    no_blank(phrase_delimiters, "segmenter.phrase_delimiters");
    if (min_phrase_words < 1) throw ValidationError("segmenter.min_phrase_words", "must be >= 1");
}

std::vector<TextPiece> split_sentences(std::string_view text, const SegmenterConfig& cfg) {
    return split_on(text, cfg.sentence_delimiters);
}

std::vector<TextPiece> split_phrase_pieces(std::string_view sentence, const SegmenterConfig& cfg) {
    auto pieces = split_on(sentence, cfg.phrase_delimiters);
    const bool blocked = pieces.size() <= 1 ||
                         std::any_of(pieces.begin(), pieces.end(), [&](const TextPiece& p) {
                             return text::word_count(p.text) <= cfg.min_phrase_words;
                         });
    if (!blocked) return pieces;

    const auto whole = text::trim(sentence);
    if (whole.empty()) return {};
    const std::size_t start = static_cast<std::size_t>(whole.data() - sentence.data());
    return {TextPiece{std::string(whole), {start, start + whole.size()}}};
}

std::vector<std::string> split_phrases(std::string_view sentence, const SegmenterConfig& cfg) {
    std::vector<std::string> out;
    for (auto& p : split_phrase_pieces(sentence, cfg)) out.push_back(std::move(p.text));
    return out;
}

std::vector<Segment> segment_review(const Review& r, const SegmenterConfig& cfg) {
    std::vector<Segment> out;
    const std::string_view body = r.text;
    for (const auto& sentence : split_sentences(body, cfg)) {
        for (auto& phrase : split_phrase_pieces(sentence.text, cfg)) {
            Segment seg;
            seg.review_id = r.id;
            seg.text = std::move(phrase.text);
            seg.span = {sentence.span.start + phrase.span.start, sentence.span.start + phrase.span.end};
            out.push_back(std::move(seg));
        }
    }
    return out;
}

}  // namespace reviewlens
