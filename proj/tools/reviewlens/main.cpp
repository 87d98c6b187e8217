#ifdef REVIEWLENS_CLI11_PACKAGE
#include <CLI/CLI.hpp>
#else
#include <CLI11.hpp>
#endif

#include <functional>
#include <iostream>

#include "commands.hpp"
#include "reviewlens/error.hpp"
#include "reviewlens/json.hpp"

using namespace reviewlens;
using namespace reviewlens::cli;

namespace {

int report_error(const std::string& kind, const std::string& message, const std::string& field, int code) {
    Json err{{"error", kind}, {"message", message}};
    if (!field.empty()) err["field"] = field;
    std::cerr << err.dump() << '\n';
    return code;
}

void add_common(CLI::App* cmd, CommonOptions& c) {
    cmd->add_option("--config", c.config, "Pipeline configuration (JSON)");
    cmd->add_option("--jobs", c.jobs, "Worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", c.seed, "Seed for every random choice");
    cmd->add_option("--embedder", c.embedder, "builtin:<dim>:<seed>");
    cmd->add_option("--embeddings", c.embeddings, "Precomputed embeddings (JSON Lines {text, vec})");
    cmd->add_flag("--quiet", c.quiet, "No stage logs on stderr");
}

void add_sentiment_flags(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--delta-p", o.delta_p, "Sentiment confidence threshold");
    cmd->add_option("--lexicon", o.lexicon, "Lexicon (JSON Lines {token, weight})");
    cmd->add_option("--scores", o.scores, "Precomputed scores (JSON Lines {text, p, n})");
    cmd->add_option("--lexicon-gain", o.lexicon_gain, "Lexicon saturation gain");
}

void add_match_flags(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--k", o.k, "Keywords averaged by the top-k signal");
    cmd->add_option("--delta-h", o.delta_h, "High-confidence threshold");
    cmd->add_option("--delta-m", o.delta_m, "Majority-vote threshold");
    cmd->add_option("--delta-avg", o.delta_avg, "Best-average threshold");
}

void add_clean_flags(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--delta-intra", o.delta_intra, "Redundancy threshold within a topic");
    cmd->add_option("--delta-e", o.delta_e, "Ambiguity threshold across topics");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Structured insights (topic, polarity, verbatim) from customer reviews"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "reviewlens 0.1.0");

    CommonOptions common;
    Overrides over;
    std::function<void(const PipelineConfig&)> action;

    auto sub = [&](CLI::App* parent, const std::string& name, const std::string& desc) {
        auto* cmd = parent->add_subcommand(name, desc);
        add_common(cmd, common);
        return cmd;
    };

    SegmentArgs seg;
    auto* segment = sub(&app, "segment", "Split reviews into segments");
    segment->add_option("--in", seg.in, "Reviews (JSON Lines)")->required();
    segment->add_option("--out", seg.out, "Segments (JSON Lines)")->required();
    segment->callback([&] { action = [&](const PipelineConfig& cfg) { run_segment(cfg, common, seg); }; });

    SentimentArgs sen;
    auto* sentiment = sub(&app, "sentiment", "Assign polarity to segments");
    sentiment->add_option("--in", sen.in, "Segments (JSON Lines)")->required();
    sentiment->add_option("--out", sen.out, "Classified segments (JSON Lines)")->required();
    sentiment->add_flag("--keep-neutral", sen.keep_neutral, "Write neutral segments too");
    add_sentiment_flags(sentiment, over);
    sentiment->callback([&] { action = [&](const PipelineConfig& cfg) { run_sentiment(cfg, common, sen); }; });

    MatchArgs mat;
    auto* match = sub(&app, "match", "Match classified segments to taxonomy topics");
    match->add_option("--segments", mat.segments, "Classified segments (JSON Lines)")->required();
    match->add_option("--taxonomy", mat.taxonomy, "Taxonomy (JSON)")->required();
    match->add_option("--out", mat.out, "Match outcomes with signals (JSON Lines)")->required();
    add_match_flags(match, over);
    match->callback([&] { action = [&](const PipelineConfig& cfg) { run_match(cfg, common, mat); }; });

    auto* build = app.add_subcommand("build-taxonomy", "Semi-supervised taxonomy construction");
    build->require_subcommand(1);

    ClusterArgs clu;
    auto* cluster = sub(build, "cluster", "Cluster classified segments per polarity");
    cluster->add_option("--segments", clu.segments, "Classified segments (JSON Lines)")->required();
    cluster->add_option("--out", clu.out, "Clusters (JSON)")->required();
    cluster->add_option("--sim-threshold", over.sim_threshold, "Neighbour similarity threshold");
    cluster->add_option("--min-cluster-size", over.min_cluster_size, "Smallest cluster kept");
    cluster->callback([&] { action = [&](const PipelineConfig& cfg) { run_cluster(cfg, common, clu); }; });

    ExportArgs exp;
    auto* exporter = sub(build, "export", "Write an annotator review file for clusters");
    exporter->add_option("--clusters", exp.clusters, "Clusters (JSON)")->required();
    exporter->add_option("--out", exp.out, "Review file (JSON)")->required();
    exporter->callback([&] { action = [&](const PipelineConfig& cfg) { run_export(cfg, common, exp); }; });

    ImportArgs imp;
    auto* importer = sub(build, "import", "Turn an annotated review file into a taxonomy");
    importer->add_option("--review", imp.review, "Annotated review file (JSON)")->required();
    importer->add_option("--out", imp.out, "Taxonomy (JSON)")->required();
    importer->callback([&] { action = [&](const PipelineConfig& cfg) { run_import(cfg, common, imp); }; });

    CleanArgs cln;
    auto* clean = sub(build, "clean", "Remove redundant and ambiguous keywords");
    clean->add_option("--taxonomy", cln.taxonomy, "Taxonomy (JSON)")->required();
    clean->add_option("--out", cln.out, "Cleaned taxonomy (JSON)")->required();
    add_clean_flags(clean, over);
    clean->callback([&] { action = [&](const PipelineConfig& cfg) { run_clean(cfg, common, cln); }; });

    ReportArgs rep;
    auto* report = sub(build, "report", "Taxonomy quality report");
    report->add_option("--taxonomy", rep.taxonomy, "Taxonomy (JSON)")->required();
    report->add_option("--out", rep.out, "Report (JSON); stdout when omitted");
    add_clean_flags(report, over);
    report->callback([&] { action = [&](const PipelineConfig& cfg) { run_report(cfg, common, rep); }; });

    GenerateArgs gen;
    auto* generate = sub(&app, "generate-data", "Labelled records and decomposed training pairs");
    generate->add_option("--reviews", gen.reviews, "Reviews (JSON Lines)")->required();
    generate->add_option("--taxonomy", gen.taxonomy, "Taxonomy (JSON)")->required();
    generate->add_option("--out", gen.out, "Training pairs (JSON Lines)")->required();
    generate->add_option("--records", gen.records, "Also write labelled records (JSON Lines)");
    generate->add_option("--templates", over.templates, "Prompt templates (JSON)");
    generate->add_option("--augment", over.augment, "Shuffled variants per review");
    add_sentiment_flags(generate, over);
    add_match_flags(generate, over);
    generate->callback([&] { action = [&](const PipelineConfig& cfg) { run_generate(cfg, common, gen); }; });

    InferArgs inf;
    auto* infer = sub(&app, "infer", "Decomposed-prompt inference");
    infer->add_option("--reviews", inf.reviews, "Reviews (JSON Lines)")->required();
    infer->add_option("--adapter", inf.adapter, "rule | exec:<command>");
    infer->add_option("--taxonomy", inf.taxonomy, "Taxonomy (JSON); required by the rule adapter");
    infer->add_option("--templates", over.templates, "Prompt templates (JSON)");
    infer->add_option("--out", inf.out, "Raw bundles (JSON Lines)")->required();
    add_sentiment_flags(infer, over);
    add_match_flags(infer, over);
    infer->callback([&] { action = [&](const PipelineConfig& cfg) { run_infer(cfg, common, inf); }; });

    PostArgs pst;
    auto* post = sub(&app, "postprocess", "Reconcile generated topics with the taxonomy");
    post->add_option("--bundles", pst.bundles, "Raw bundles (JSON Lines)")->required();
    post->add_option("--taxonomy", pst.taxonomy, "Taxonomy (JSON)")->required();
    post->add_option("--out", pst.out, "Hierarchical insights (JSON Lines)")->required();
    post->add_option("--delta", pst.delta, "Proposed taxonomy additions (JSON)");
    post->add_option("--records", pst.records, "Also write labelled records (JSON Lines)");
    post->add_option("--exact-replace", over.exact_replace, "Replace threshold on topic similarity");
    post->add_option("--l4-topic", over.l4_topic, "L4 threshold on topic similarity");
    post->add_option("--l4-verbatim", over.l4_verbatim, "L4 threshold on verbatim similarity");
    post->callback([&] { action = [&](const PipelineConfig& cfg) { run_postprocess(cfg, common, pst); }; });

    EvaluateArgs ev;
    auto* evaluate = sub(&app, "evaluate", "Topic and verbatim metrics against gold records");
    evaluate->add_option("--gold", ev.gold, "Gold records (JSON Lines)")->required();
    evaluate->add_option("--pred", ev.pred, "Predicted records (JSON Lines)")->required();
    evaluate->add_option("--report", ev.report, "Report (JSON); stdout when omitted");
    evaluate->add_flag("--l3-only", ev.l3_only, "Score L4 insights under their parent L3");
    evaluate->add_option("--sim-floor", ev.sim_floor, "Verbatim similarity threshold");
    evaluate->callback([&] { action = [&](const PipelineConfig& cfg) { run_evaluate(cfg, common, ev); }; });

    StatsArgs st;
    auto* stats = sub(&app, "stats", "Topic distribution of labelled records");
    stats->add_option("--records", st.records, "Labelled records (JSON Lines)")->required();
    stats->add_option("--out", st.out, "Statistics (JSON); stdout when omitted");
    stats->add_flag("--l3-only", st.l3_only, "Count L4 insights under their parent L3");
    stats->callback([&] { action = [&](const PipelineConfig& cfg) { run_stats(cfg, common, st); }; });

    PipelineArgs pip;
    auto* pipeline = sub(&app, "pipeline", "segment, sentiment, match and generate-data in one pass");
    pipeline->add_option("--reviews", pip.reviews, "Reviews (JSON Lines)")->required();
    pipeline->add_option("--taxonomy", pip.taxonomy, "Taxonomy (JSON)")->required();
    pipeline->add_option("--out", pip.out, "Labelled records (JSON Lines)")->required();
    pipeline->add_option("--pairs", pip.pairs, "Also write training pairs (JSON Lines)");
    pipeline->add_option("--templates", over.templates, "Prompt templates (JSON)");
    pipeline->add_option("--augment", over.augment, "Shuffled variants per review");
    add_sentiment_flags(pipeline, over);
    add_match_flags(pipeline, over);
    pipeline->callback([&] { action = [&](const PipelineConfig& cfg) { run_pipeline(cfg, common, pip); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return report_error("usage", e.what(), "", 1);
    }

    try {
        const auto cfg = resolve_config(common, over);
        action(cfg);
    } catch (const ValidationError& e) {
        return report_error("validation", e.what(), e.field(), 1);
    } catch (const DataError& e) {
        return report_error("data", e.what(), "", 2);
    } catch (const Json::exception& e) {
        return report_error("data", e.what(), "", 2);
    } catch (const std::exception& e) {
        return report_error("internal", e.what(), "", 2);
    }
    return 0;
}
