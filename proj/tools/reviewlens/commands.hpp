#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "reviewlens/config.hpp"

namespace reviewlens::cli {

/// Flags every subcommand accepts. Set flags override the config file.
struct CommonOptions {
    std::string config;
    std::optional<std::size_t> jobs;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> embedder;
    std::optional<std::string> embeddings;
    bool quiet = false;
};

/// Per-stage threshold flags; unset ones leave the config untouched.
struct Overrides {
    std::optional<double> delta_p;
    std::optional<std::string> lexicon;
    std::optional<std::string> scores;
    std::optional<double> lexicon_gain;
    std::optional<std::size_t> k;
    std::optional<double> delta_h;
    std::optional<double> delta_m;
    std::optional<double> delta_avg;
    std::optional<double> sim_threshold;
    std::optional<std::size_t> min_cluster_size;
    std::optional<double> delta_intra;
    std::optional<double> delta_e;
    std::optional<double> exact_replace;
    std::optional<double> l4_topic;
    std::optional<double> l4_verbatim;
    std::optional<std::string> templates;
    std::optional<std::size_t> augment;
};

/// Config file (or defaults) with common flags and overrides applied, validated.
PipelineConfig resolve_config(const CommonOptions& common, const Overrides& o);

struct SegmentArgs {
    std::string in, out;
};
struct SentimentArgs {
    std::string in, out;
    bool keep_neutral = false;
};
struct MatchArgs {
    std::string segments, taxonomy, out;
};
struct ClusterArgs {
    std::string segments, out;
};
struct ExportArgs {
    std::string clusters, out;
};
struct ImportArgs {
    std::string review, out;
};
struct CleanArgs {
    std::string taxonomy, out;
};
struct ReportArgs {
    std::string taxonomy, out;
};
struct GenerateArgs {
    std::string reviews, taxonomy, out, records;
};
struct InferArgs {
    std::string reviews, taxonomy, adapter = "rule", out;
};
struct PostArgs {
    std::string bundles, taxonomy, out, delta, records;
};
struct EvaluateArgs {
    std::string gold, pred, report;
    bool l3_only = false;
    double sim_floor = 0.8;
};
struct StatsArgs {
    std::string records, out;
    bool l3_only = false;
};
struct PipelineArgs {
    std::string reviews, taxonomy, out, pairs;
};

void run_segment(const PipelineConfig& cfg, const CommonOptions& c, const SegmentArgs& a);
void run_sentiment(const PipelineConfig& cfg, const CommonOptions& c, const SentimentArgs& a);
void run_match(const PipelineConfig& cfg, const CommonOptions& c, const MatchArgs& a);
void run_cluster(const PipelineConfig& cfg, const CommonOptions& c, const ClusterArgs& a);
void run_export(const PipelineConfig& cfg, const CommonOptions& c, const ExportArgs& a);
void run_import(const PipelineConfig& cfg, const CommonOptions& c, const ImportArgs& a);
void run_clean(const PipelineConfig& cfg, const CommonOptions& c, const CleanArgs& a);
void run_report(const PipelineConfig& cfg, const CommonOptions& c, const ReportArgs& a);
void run_generate(const PipelineConfig& cfg, const CommonOptions& c, const GenerateArgs& a);
void run_infer(const PipelineConfig& cfg, const CommonOptions& c, const InferArgs& a);
void run_postprocess(const PipelineConfig& cfg, const CommonOptions& c, const PostArgs& a);
void run_evaluate(const PipelineConfig& cfg, const CommonOptions& c, const EvaluateArgs& a);
void run_stats(const PipelineConfig& cfg, const CommonOptions& c, const StatsArgs& a);
void run_pipeline(const PipelineConfig& cfg, const CommonOptions& c, const PipelineArgs& a);

}  // namespace reviewlens::cli
