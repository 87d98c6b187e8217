#include "reviewlens/datagen.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <unordered_map>

#include "reviewlens/error.hpp"
#include "reviewlens/parallel.hpp"
#include "reviewlens/text.hpp"

namespace reviewlens {

namespace {

constexpr std::string_view kSlotNames[] = {"review", "topic", "polarity"};

bool is_slot_name(std::string_view s) {
    return std::find(std::begin(kSlotNames), std::end(kSlotNames), s) != std::end(kSlotNames);
}

}  // namespace

PromptTemplate::PromptTemplate(std::string source, std::vector<std::string> required, std::string field)
    : source_(std::move(source)) {
    std::string literal;
    std::size_t i = 0;
    while (i < source_.size()) {
        if (source_[i] == '{') {
            const auto close = source_.find('}', i);
            if (close != std::string::npos && is_slot_name(std::string_view(source_).substr(i + 1, close - i - 1))) {
                if (!literal.empty()) parts_.push_back({false, std::move(literal)});
                literal.clear();
                if (!parts_.empty() && parts_.back().slot) {
                    throw ValidationError(field, "adjacent slots need literal text between them");
                }
                parts_.push_back({true, source_.substr(i + 1, close - i - 1)});
                i = close + 1;
                continue;
            }
        }
        literal.push_back(source_[i++]);
    }
    if (!literal.empty()) parts_.push_back({false, std::move(literal)});

    std::map<std::string, int> counts;
    for (const auto& p : parts_) {
        if (p.slot) ++counts[p.text];
    }
    for (const auto& name : required) {
        const int c = counts[name];
        if (c != 1) {
            throw ValidationError(field, "slot {" + name + "} must appear exactly once (found " + std::to_string(c) + ")");
        }
    }
    for (const auto& [name, c] : counts) {
        if (c > 0 && std::find(required.begin(), required.end(), name) == required.end()) {
            throw ValidationError(field, "slot {" + name + "} is not allowed here");
        }
    }
}

std::string PromptTemplate::render(const std::map<std::string, std::string, std::less<>>& values) const {
    std::string out;
    for (const auto& p : parts_) {
        if (!p.slot) {
            out += p.text;
            continue;
        }
        const auto it = values.find(p.text);
        if (it == values.end()) throw ValidationError("templates", "no value for slot {" + p.text + "}");
        out += it->second;
    }
    return out;
}

std::optional<std::map<std::string, std::string, std::less<>>> PromptTemplate::match(std::string_view prompt) const {
    std::map<std::string, std::string, std::less<>> values;
    std::size_t pos = 0;
    std::size_t limit = prompt.size();
    std::size_t first = 0;
    std::size_t last = parts_.size();

    if (!parts_.empty() && !parts_.front().slot) {
        if (!prompt.starts_with(parts_.front().text)) return std::nullopt;
        pos = parts_.front().text.size();
        first = 1;
    }
    if (last > first && !parts_.back().slot) {
        const auto& suffix = parts_.back().text;
        if (prompt.size() < pos + suffix.size() || !prompt.ends_with(suffix)) return std::nullopt;
        limit = prompt.size() - suffix.size();
        last -= 1;
    }

    for (std::size_t i = first; i < last; ++i) {
        const auto& p = parts_[i];
        if (!p.slot) continue;
        std::size_t end = limit;
        if (i + 1 < last) {
            const auto& next = parts_[i + 1].text;
            end = prompt.substr(0, limit).find(next, pos);
            if (end == std::string_view::npos) return std::nullopt;
        }
        values[p.text] = std::string(prompt.substr(pos, end - pos));
        pos = end;
        if (i + 1 < last) {
            pos += parts_[i + 1].text.size();
            ++i;
        }
    }
    if (pos != limit) return std::nullopt;
    return values;
}

void PromptTemplates::validate() const {
    PromptTemplate(topic_q, {"review"}, "templates.topic_q");
    PromptTemplate(polarity_q, {"review", "topic"}, "templates.polarity_q");
    PromptTemplate(verbatim_q, {"review", "topic", "polarity"}, "templates.verbatim_q");
}

std::string PromptTemplates::topic_prompt(std::string_view review) const {
    return PromptTemplate(topic_q, {"review"}, "templates.topic_q").render({{"review", std::string(review)}});
}

std::string PromptTemplates::polarity_prompt(std::string_view review, std::string_view topic) const {
    return PromptTemplate(polarity_q, {"review", "topic"}, "templates.polarity_q")
        .render({{"review", std::string(review)}, {"topic", std::string(topic)}});
}

std::string PromptTemplates::verbatim_prompt(std::string_view review, std::string_view topic, Polarity polarity) const {
    return PromptTemplate(verbatim_q, {"review", "topic", "polarity"}, "templates.verbatim_q")
        .render({{"review", std::string(review)},
                 {"topic", std::string(topic)},
                 {"polarity", std::string(to_string(polarity))}});
}

std::string_view to_string(Phase p) noexcept {
    switch (p) {
        case Phase::Topic: return "topic";
        case Phase::Polarity: return "polarity";
        case Phase::Verbatim: return "verbatim";
    }
    return "topic";
}

void to_json(Json& j, const TrainingPair& p) {
    j = Json{{"prompt", p.prompt}, {"target", p.target}, {"phase", to_string(p.phase)}, {"review_id", p.review_id}};
}

std::string format_topic_list(const std::vector<std::string>& topics) {
    return "[" + text::join(topics, ", ") + "]";
}

std::string format_verbatims(const std::vector<std::string>& verbatims) {
    return text::join(verbatims, kVerbatimSeparator);
}

SegmentNetStats& SegmentNetStats::operator+=(const SegmentNetStats& o) noexcept {
    reviews += o.reviews;
    segments += o.segments;
    neutral_dropped += o.neutral_dropped;
    no_match_dropped += o.no_match_dropped;
    insights += o.insights;
    return *this;
}

namespace {

const Taxonomy& checked(const Taxonomy& t) {
    const auto violations = validate_taxonomy(t);
    if (!violations.empty()) {
        const auto& v = violations.front();
        throw ValidationError("taxonomy", v.rule + " at topic '" + v.topic_id + "': " + v.message);
    }
    return t;
}

}  // namespace

SegmentNet::SegmentNet(const Taxonomy& taxonomy, SegmenterConfig seg_cfg, SentimentConfig sent_cfg,
                       MatchConfig match_cfg, const SentimentClassifier& classifier, Similarity sim)
    : taxonomy_(&checked(taxonomy)),
      seg_cfg_(std::move(seg_cfg)),
      sent_cfg_(sent_cfg),
      classifier_(&classifier),
      matcher_(taxonomy, match_cfg, sim) {
    seg_cfg_.validate();
    sent_cfg_.validate();
}

std::vector<Segment> SegmentNet::classify(const Review& review) const {
    auto segments = segment_review(review, seg_cfg_);
    for (auto& s : segments) s = classify_segment(std::move(s), *classifier_, sent_cfg_);
    return segments;
}

LabelledRecord SegmentNet::label(const Review& review, SegmentNetStats* stats) const {
    SegmentNetStats local;
    local.reviews = 1;
    LabelledRecord rec{review, {}};
    std::unordered_map<std::string, std::size_t> slot;  // topic id -> insight index

    for (const auto& seg : classify(review)) {
        ++local.segments;
        if (seg.polarity == Polarity::Neutral) {
            ++local.neutral_dropped;
            continue;
        }
        const auto outcome = matcher_.match(seg);
        if (!outcome.matched) {
            ++local.no_match_dropped;
            continue;
        }
        const GranularTopic& topic = *outcome.matched;
        const auto [it, fresh] = slot.emplace(topic.id, rec.insights.size());
        if (fresh) {
            rec.insights.push_back(Insight{topic.name, topic.id, std::nullopt, topic.polarity, {}, Provenance::Matched});
        }
        rec.insights[it->second].verbatims.push_back(seg.text);
    }
    local.insights = rec.insights.size();
    if (stats) *stats += local;
    return rec;
}

std::vector<LabelledRecord> generate_labelled(std::span<const Review> reviews, const SegmentNet& net, std::size_t jobs,
                                              SegmentNetStats* stats) {
    auto labelled = parallel_map(reviews, jobs, [&](const Review& r) {
        SegmentNetStats s;
        auto rec = net.label(r, &s);
        return std::make_pair(std::move(rec), s);
    });
    std::vector<LabelledRecord> out;
    out.reserve(labelled.size());
    for (auto& [rec, s] : labelled) {
        if (stats) *stats += s;
        out.push_back(std::move(rec));
    }
    return out;
}

std::vector<TrainingPair> serialize_training_pairs(const LabelledRecord& rec, const PromptTemplates& tpl) {
    tpl.validate();
    const auto& review = rec.review.text;
    std::vector<TrainingPair> out;
    out.reserve(2 * rec.insights.size() + 1);

    std::vector<std::string> names;
    for (const auto& ins : rec.insights) names.push_back(ins.topic);
    out.push_back({tpl.topic_prompt(review), format_topic_list(names), Phase::Topic, rec.review.id});

    for (const auto& ins : rec.insights) {
        out.push_back({tpl.polarity_prompt(review, ins.topic), std::string(to_string(ins.polarity)), Phase::Polarity,
                       rec.review.id});
    }
    for (const auto& ins : rec.insights) {
        out.push_back({tpl.verbatim_prompt(review, ins.topic, ins.polarity), format_verbatims(ins.verbatims),
                       Phase::Verbatim, rec.review.id});
    }
    return out;
}

namespace {

// Uniform draw in [0, bound) from a fully specified engine; modulo bias is
// negligible for the tiny bounds used here.
std::size_t draw(std::mt19937_64& rng, std::size_t bound) { return static_cast<std::size_t>(rng() % bound); }

}  // namespace

std::vector<LabelledRecord> shuffle_augment(const LabelledRecord& rec, std::size_t max_variants, std::uint64_t seed) {
    std::vector<std::string> sentences;
    for (const auto& piece : text::split(rec.review.text, ".")) {
        const auto t = text::trim(piece);
        if (!t.empty()) sentences.emplace_back(t);
    }
    const std::size_t n = sentences.size();
    if (n < 2 || max_variants == 0) return {};

    std::mt19937_64 rng(seed);
    std::vector<std::vector<std::string>> chosen;

    constexpr std::size_t kEnumerateUpTo = 7;  // 7! orderings
    if (n <= kEnumerateUpTo) {
        // Distinct orderings (repeated sentences collapse), minus the original.
        std::vector<std::vector<std::string>> all;
        auto p = sentences;
        std::sort(p.begin(), p.end());
        do {
            if (p != sentences) all.push_back(p);
        } while (std::next_permutation(p.begin(), p.end()));
        const std::size_t want = std::min(max_variants, all.size());
        // Partial Fisher-Yates picks `want` of them.
        for (std::size_t i = 0; i < want; ++i) {
            std::swap(all[i], all[i + draw(rng, all.size() - i)]);
            chosen.push_back(all[i]);
        }
    } else {
        std::set<std::vector<std::string>> seen{sentences};
        for (std::size_t attempt = 0; chosen.size() < max_variants && attempt < 1000 * max_variants; ++attempt) {
            auto p = sentences;
            for (std::size_t i = n - 1; i > 0; --i) std::swap(p[i], p[draw(rng, i + 1)]);
            if (seen.insert(p).second) chosen.push_back(std::move(p));
        }
    }

    std::vector<LabelledRecord> out;
    out.reserve(chosen.size());
    for (std::size_t v = 0; v < chosen.size(); ++v) {
        LabelledRecord copy = rec;
        copy.review.id = rec.review.id + "#shuffle-" + std::to_string(v + 1);
        copy.review.text = text::join(chosen[v], ". ");
        out.push_back(std::move(copy));
    }
    return out;
}

}  // namespace reviewlens
