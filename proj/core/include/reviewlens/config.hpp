#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "reviewlens/datagen.hpp"
#include "reviewlens/embedding.hpp"
#include "reviewlens/json.hpp"
#include "reviewlens/matching.hpp"
#include "reviewlens/postprocess.hpp"
#include "reviewlens/segmentation.hpp"
#include "reviewlens/sentiment.hpp"
#include "reviewlens/taxonomy_builder.hpp"

namespace reviewlens {

struct SentimentSource {
    std::optional<std::filesystem::path> lexicon;
    std::optional<std::filesystem::path> scores;  // takes precedence over the lexicon
    double lexicon_gain = 1.0;
};

/// Every tunable of every stage in one document.
struct PipelineConfig {
    SegmenterConfig segmenter;
    SentimentConfig sentiment;
    SentimentSource sentiment_source;
    MatchConfig match;
    ClusterConfig cluster;
    CleanConfig clean;
    PostConfig post;
    PromptTemplates templates;
    std::string embedder = "builtin:256:17";
    std::optional<std::filesystem::path> embeddings;  // replaces `embedder` when set
    std::uint64_t seed = 17;
    std::size_t jobs = 1;
    std::size_t augment = 0;

    /// Range checks for every section. Throws ValidationError naming the field.
    void validate() const;
};

/// Missing keys keep their defaults; unknown keys and out-of-range values
/// throw ValidationError with a dotted field name ("sentiment.delta_p").
/// Relative paths resolve against `base_dir`.
PipelineConfig config_from_json(const Json& j, const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);
Json config_to_json(const PipelineConfig& cfg);

std::unique_ptr<EmbeddingProvider> make_provider(const PipelineConfig& cfg);
/// Throws ValidationError when neither a lexicon nor a scores file is configured.
std::unique_ptr<SentimentClassifier> make_classifier(const PipelineConfig& cfg);

}  // namespace reviewlens
