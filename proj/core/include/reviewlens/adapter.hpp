#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "reviewlens/datagen.hpp"
#include "reviewlens/json.hpp"
#include "reviewlens/model.hpp"

namespace reviewlens {

/// Text-to-text model answering one decomposed prompt at a time.
/// Implementations need not be thread-safe; use one instance per worker.
class GenerativeModel {
public:
    virtual ~GenerativeModel() = default;
    virtual std::string generate(std::string_view prompt) = 0;
};

/// One generated (topic, polarity, verbatims) triple, before post-processing.
struct RawTopic {
    std::string name;
    Polarity polarity = Polarity::Positive;
    std::vector<std::string> verbatims;

    bool operator==(const RawTopic&) const = default;
};

struct RawBundle {
    Review review;
    std::vector<RawTopic> topics;
    std::vector<std::string> warnings;

    bool operator==(const RawBundle&) const = default;
};

void to_json(Json& j, const RawBundle& b);
void from_json(const Json& j, RawBundle& b);

struct ParsedList {
    std::vector<std::string> items;
    bool lenient = false;  // true when the bracketed form was not followed
};

/// Strict form "[a, b]"; otherwise strips brackets and splits on commas.
/// nullopt when the text carries no list at all.
std::optional<ParsedList> parse_topic_list(std::string_view output);
/// "positive" / "negative"; case, quotes, brackets and trailing dots are
/// tolerated (and reported through `lenient`).
std::optional<Polarity> parse_polarity_answer(std::string_view output, bool* lenient = nullptr);
/// Items separated by " | "; nullopt when empty.
std::optional<std::vector<std::string>> parse_verbatims(std::string_view output);

/// Runs the three prompt phases for one review: the topic list, then one
/// polarity prompt per topic, then one verbatim prompt per surviving
/// (topic, polarity) pair. Unparseable phase output drops that topic (or the
/// whole bundle for phase one) and records a warning.
RawBundle run_inference(const Review& review, GenerativeModel& model, const PromptTemplates& tpl);

using ModelFactory = std::function<std::unique_ptr<GenerativeModel>()>;

/// Splits the reviews into `jobs` contiguous chunks, one model per chunk.
std::vector<RawBundle> run_inference_batch(std::span<const Review> reviews, const ModelFactory& factory,
                                           const PromptTemplates& tpl, std::size_t jobs = 1);

/// Answers prompts by running SegmentNet on the review embedded in the prompt
/// and formatting the requested phase in the canonical target format.
class RuleBasedAdapter final : public GenerativeModel {
public:
    RuleBasedAdapter(const SegmentNet& net, PromptTemplates tpl);

    /// Throws DataError for prompts matching none of the templates.
    std::string generate(std::string_view prompt) override;

private:
    const LabelledRecord& labelled(const std::string& review_text);

    const SegmentNet* net_;
    PromptTemplates tpl_;
    PromptTemplate topic_;
    PromptTemplate polarity_;
    PromptTemplate verbatim_;
    std::optional<LabelledRecord> last_;
};

/// Forwards to another model and counts calls.
class CountingModel final : public GenerativeModel {
public:
    explicit CountingModel(GenerativeModel& inner) : inner_(&inner) {}

    std::string generate(std::string_view prompt) override {
        ++calls_;
        return inner_->generate(prompt);
    }
    std::size_t calls() const noexcept { return calls_; }

private:
    GenerativeModel* inner_;
    std::size_t calls_ = 0;
};

/// Talks to an external process over its standard streams: one JSON object
/// {"prompt": ...} per line out, one {"text": ...} per line back. The command
/// runs under /bin/sh -c.
class ExecModel final : public GenerativeModel {
public:
    explicit ExecModel(const std::string& command);
    ~ExecModel() override;
    ExecModel(const ExecModel&) = delete;
    ExecModel& operator=(const ExecModel&) = delete;

    /// Throws DataError if the process exits or answers with malformed JSON.
    std::string generate(std::string_view prompt) override;

private:
    std::string read_line();

    int fd_ = -1;
    int pid_ = -1;
    std::string buffer_;
    std::string command_;
};

}  // namespace reviewlens
