#include "commands.hpp"

#include <iostream>
#include <map>

#include "reviewlens/adapter.hpp"
#include "reviewlens/datagen.hpp"
#include "reviewlens/error.hpp"
#include "reviewlens/eval.hpp"
#include "reviewlens/json.hpp"
#include "reviewlens/matching.hpp"
#include "reviewlens/parallel.hpp"
#include "reviewlens/postprocess.hpp"
#include "reviewlens/segmentation.hpp"
#include "reviewlens/sentiment.hpp"
#include "reviewlens/taxonomy_builder.hpp"

namespace reviewlens::cli {

namespace {

// One JSON object per line on stderr.
void log_stage(const CommonOptions& c, const std::string& stage, Json fields) {
    if (c.quiet) return;
    Json line{{"stage", stage}};
    line.update(fields);
    std::cerr << line.dump() << '\n';
}

struct Embedder {
    explicit Embedder(const PipelineConfig& cfg) : provider(make_provider(cfg)) {}

    Similarity sim() { return Similarity(*provider, &cache); }

    std::unique_ptr<EmbeddingProvider> provider;
    EmbeddingCache cache;
};

void write_doc(const std::string& path, const Json& doc) {
    if (path.empty() || path == "-") {
        std::cout << doc.dump(2) << '\n';
    } else {
        io::write_json(path, doc);
    }
}

Json signal_json(const SignalResult& s) {
    return Json{{"topic", s.topic ? Json(s.topic->id) : Json(nullptr)}, {"score", s.score}};
}

std::uint64_t record_seed(std::uint64_t seed, std::size_t index) {
    // splitmix64 step so neighbouring records get unrelated streams
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(index) + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Labels the reviews and appends shuffled variants after each record.
std::vector<LabelledRecord> label_corpus(const PipelineConfig& cfg, const CommonOptions& c,
                                         std::span<const Review> reviews, const Taxonomy& taxonomy) {
    Embedder emb(cfg);
    const auto classifier = make_classifier(cfg);
    const SegmentNet net(taxonomy, cfg.segmenter, cfg.sentiment, cfg.match, *classifier, emb.sim());

    SegmentNetStats stats;
    const auto labelled = generate_labelled(reviews, net, cfg.jobs, &stats);
    log_stage(c, "segment", {{"reviews", stats.reviews}, {"segments", stats.segments}});
    log_stage(c, "sentiment", {{"segments", stats.segments}, {"neutral_dropped", stats.neutral_dropped}});
    log_stage(c, "match",
              {{"segments", stats.segments - stats.neutral_dropped},
               {"no_match_dropped", stats.no_match_dropped},
               {"insights", stats.insights}});

    std::vector<LabelledRecord> out;
    std::size_t variants = 0;
    for (std::size_t i = 0; i < labelled.size(); ++i) {
        out.push_back(labelled[i]);
        if (cfg.augment == 0) continue;
        for (auto& v : shuffle_augment(labelled[i], cfg.augment, record_seed(cfg.seed, i))) {
            out.push_back(std::move(v));
            ++variants;
        }
    }
    if (cfg.augment > 0) log_stage(c, "augment", {{"records", labelled.size()}, {"variants", variants}});
    return out;
}

std::vector<Json> training_rows(const std::vector<LabelledRecord>& records, const PromptTemplates& tpl) {
    std::vector<Json> rows;
    for (const auto& r : records) {
        for (const auto& p : serialize_training_pairs(r, tpl)) rows.emplace_back(p);
    }
    return rows;
}

}  // namespace

PipelineConfig resolve_config(const CommonOptions& common, const Overrides& o) {
    Json doc = common.config.empty() ? Json::object() : io::read_json(common.config);
    if (!doc.is_object()) throw ValidationError("config", "must be a JSON object");
    auto set = [&doc](const char* section, const char* key, const auto& value) {
        if (value) doc[section][key] = *value;
    };
    set("sentiment", "delta_p", o.delta_p);
    set("sentiment", "lexicon_gain", o.lexicon_gain);
    set("match", "k", o.k);
    set("match", "delta_h", o.delta_h);
    set("match", "delta_m", o.delta_m);
    set("match", "delta_avg", o.delta_avg);
    set("cluster", "sim_threshold", o.sim_threshold);
    set("cluster", "min_cluster_size", o.min_cluster_size);
    set("clean", "delta_intra", o.delta_intra);
    set("clean", "delta_e", o.delta_e);
    set("post", "exact_replace", o.exact_replace);
    set("post", "l4_topic", o.l4_topic);
    set("post", "l4_verbatim", o.l4_verbatim);
    if (o.augment) doc["augment"] = *o.augment;
    if (common.jobs) doc["jobs"] = *common.jobs;
    if (common.seed) doc["seed"] = *common.seed;
    if (common.embedder) {
        doc["embedder"] = *common.embedder;
        doc["embeddings"] = nullptr;
    }
    if (o.templates) doc["templates"] = io::read_json(*o.templates);

    // Paths in the file resolve against its directory; flag paths against the
    // working directory.
    const std::filesystem::path base =
        common.config.empty() ? std::filesystem::path() : std::filesystem::path(common.config).parent_path();
    PipelineConfig cfg = config_from_json(doc, base);
    if (o.lexicon) {
        cfg.sentiment_source.lexicon = *o.lexicon;
        cfg.sentiment_source.scores.reset();
    }
    if (o.scores) cfg.sentiment_source.scores = *o.scores;
    if (common.embeddings) cfg.embeddings = *common.embeddings;
    cfg.validate();
    return cfg;
}

void run_segment(const PipelineConfig& cfg, const CommonOptions& c, const SegmentArgs& a) {
    const auto reviews = io::read_reviews(a.in);
    const auto per_review = parallel_map(std::span<const Review>(reviews), cfg.jobs,
                                         [&](const Review& r) { return segment_review(r, cfg.segmenter); });
    std::vector<Json> rows;
    for (const auto& segs : per_review) {
        for (const auto& s : segs) rows.emplace_back(s);
    }
    io::write_jsonl(a.out, rows);
    log_stage(c, "segment", {{"reviews", reviews.size()}, {"segments", rows.size()}});
}

void run_sentiment(const PipelineConfig& cfg, const CommonOptions& c, const SentimentArgs& a) {
    const auto segments = io::read_jsonl_as<Segment>(a.in);
    const auto classifier = make_classifier(cfg);
    const auto classified = parallel_map(std::span<const Segment>(segments), cfg.jobs, [&](const Segment& s) {
        return classify_segment(s, *classifier, cfg.sentiment);
    });
    std::vector<Json> rows;
    std::size_t neutral = 0;
    for (const auto& s : classified) {
        if (s.polarity == Polarity::Neutral) {
            ++neutral;
            if (!a.keep_neutral) continue;
        }
        rows.emplace_back(s);
    }
    io::write_jsonl(a.out, rows);
    log_stage(c, "sentiment",
              {{"segments", segments.size()}, {"neutral", neutral}, {"neutral_dropped", a.keep_neutral ? 0 : neutral}});
}

void run_match(const PipelineConfig& cfg, const CommonOptions& c, const MatchArgs& a) {
    const auto segments = io::read_jsonl_as<Segment>(a.segments);
    const auto taxonomy = io::read_taxonomy(a.taxonomy);
    Embedder emb(cfg);
    const TopicMatcher matcher(taxonomy, cfg.match, emb.sim());

    struct Row {
        bool skipped = false;
        MatchOutcome outcome;
    };
    const auto results = parallel_map(std::span<const Segment>(segments), cfg.jobs, [&](const Segment& s) {
        if (!s.polarity || *s.polarity == Polarity::Neutral) return Row{true, {}};
        return Row{false, matcher.match(s)};
    });

    std::vector<Json> rows;
    std::map<std::string, std::size_t> rules;
    std::size_t skipped = 0;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const auto& r = results[i];
        if (r.skipped) {
            ++skipped;
            continue;
        }
        const auto& o = r.outcome;
        ++rules[std::string(to_string(o.rule))];
        rows.push_back(Json{{"segment", segments[i]},
                            {"matched", o.matched ? Json(o.matched->id) : Json(nullptr)},
                            {"topic", o.matched ? Json(o.matched->name) : Json(nullptr)},
                            {"rule", to_string(o.rule)},
                            {"signals",
                             {{"name", signal_json(o.signals.name)},
                              {"topk", signal_json(o.signals.topk)},
                              {"mean", signal_json(o.signals.mean)},
                              {"avg", signal_json(o.signals.avg)}}}});
    }
    io::write_jsonl(a.out, rows);
    log_stage(c, "match",
              {{"segments", segments.size()},
               {"skipped_unpolarized", skipped},
               {"no_match_dropped", rules["no_match"]},
               {"rules", rules}});
}

void run_cluster(const PipelineConfig& cfg, const CommonOptions& c, const ClusterArgs& a) {
    const auto segments = io::read_jsonl_as<Segment>(a.segments);
    Embedder emb(cfg);
    Json clusters = Json::array();
    std::size_t clustered = 0;
    for (const Polarity p : {Polarity::Positive, Polarity::Negative}) {
        std::vector<Segment> side;
        for (const auto& s : segments) {
            if (s.polarity == p) side.push_back(s);
        }
        for (const auto& cl : fast_cluster(side, p, cfg.cluster, emb.sim())) {
            clustered += cl.members.size();
            clusters.push_back(cl);
        }
    }
    write_doc(a.out, Json{{"clusters", clusters}});
    log_stage(c, "cluster",
              {{"segments", segments.size()}, {"clusters", clusters.size()}, {"clustered_segments", clustered}});
}

void run_export(const PipelineConfig&, const CommonOptions& c, const ExportArgs& a) {
    const Json doc = io::read_json(a.clusters);
    std::vector<Cluster> clusters;
    try {
        clusters = doc.at("clusters").get<std::vector<Cluster>>();
    } catch (const Json::exception& e) {
        throw DataError(a.clusters + ": " + e.what());
    }
    write_doc(a.out, export_review_file(clusters));
    log_stage(c, "export", {{"clusters", clusters.size()}});
}

void run_import(const PipelineConfig&, const CommonOptions& c, const ImportArgs& a) {
    ReviewFile file;
    try {
        file = io::read_json(a.review).get<ReviewFile>();
    } catch (const Json::exception& e) {
        throw DataError(a.review + ": " + e.what());
    }
    const auto taxonomy = import_review_file(file);
    write_doc(a.out, taxonomy);
    log_stage(c, "import", {{"entries", file.clusters.size()}, {"topics", taxonomy.topics.size()}});
}

void run_clean(const PipelineConfig& cfg, const CommonOptions& c, const CleanArgs& a) {
    const auto taxonomy = io::read_taxonomy(a.taxonomy);
    Embedder emb(cfg);
    const auto result = clean_taxonomy(taxonomy, cfg.clean, emb.sim());
    write_doc(a.out, result.taxonomy);
    log_stage(c, "clean",
              {{"topics", taxonomy.topics.size()},
               {"removed_intra", result.removed_intra},
               {"removed_inter", result.removed_inter},
               {"emptied", result.emptied}});
}

void run_report(const PipelineConfig& cfg, const CommonOptions& c, const ReportArgs& a) {
    const auto taxonomy = io::read_taxonomy(a.taxonomy);
    Embedder emb(cfg);
    const auto report = taxonomy_quality_report(taxonomy, cfg.clean, emb.sim());
    write_doc(a.out, report);
    log_stage(c, "report", {{"l3_topics", report.l3_topics}, {"exclusivity_proxy", report.exclusivity}});
}

void run_generate(const PipelineConfig& cfg, const CommonOptions& c, const GenerateArgs& a) {
    const auto reviews = io::read_reviews(a.reviews);
    const auto taxonomy = io::read_taxonomy(a.taxonomy);
    const auto records = label_corpus(cfg, c, reviews, taxonomy);
    const auto rows = training_rows(records, cfg.templates);
    io::write_jsonl(a.out, rows);
    if (!a.records.empty()) io::write_jsonl_of(a.records, records);
    log_stage(c, "generate-data", {{"records", records.size()}, {"pairs", rows.size()}});
}

void run_infer(const PipelineConfig& cfg, const CommonOptions& c, const InferArgs& a) {
    const auto reviews = io::read_reviews(a.reviews);

    std::optional<Taxonomy> taxonomy;
    std::optional<Embedder> emb;
    std::unique_ptr<SentimentClassifier> classifier;
    std::optional<SegmentNet> net;
    ModelFactory factory;

    if (a.adapter == "rule") {
        if (a.taxonomy.empty()) throw ValidationError("taxonomy", "the rule adapter needs --taxonomy");
        taxonomy = io::read_taxonomy(a.taxonomy);
        emb.emplace(cfg);
        classifier = make_classifier(cfg);
        net.emplace(*taxonomy, cfg.segmenter, cfg.sentiment, cfg.match, *classifier, emb->sim());
        factory = [&] { return std::make_unique<RuleBasedAdapter>(*net, cfg.templates); };
    } else if (a.adapter.rfind("exec:", 0) == 0 && a.adapter.size() > 5) {
        const std::string command = a.adapter.substr(5);
        factory = [command] { return std::make_unique<ExecModel>(command); };
    } else {
        throw ValidationError("adapter", "expected 'rule' or 'exec:<command>', got '" + a.adapter + "'");
    }

    const auto bundles = run_inference_batch(reviews, factory, cfg.templates, cfg.jobs);
    std::vector<Json> rows;
    std::size_t topics = 0, warnings = 0;
    for (const auto& b : bundles) {
        topics += b.topics.size();
        warnings += b.warnings.size();
        for (const auto& w : b.warnings) log_stage(c, "infer", {{"warning", w}});
        rows.emplace_back(b);
    }
    io::write_jsonl(a.out, rows);
    log_stage(c, "infer", {{"reviews", reviews.size()}, {"topics", topics}, {"warnings", warnings}});
}

void run_postprocess(const PipelineConfig& cfg, const CommonOptions& c, const PostArgs& a) {
    const auto bundles = io::read_jsonl_as<RawBundle>(a.bundles);
    const auto taxonomy = io::read_taxonomy(a.taxonomy);
    Embedder emb(cfg);
    const auto result = apply_postprocessing(bundles, taxonomy, cfg.post, emb.sim(), cfg.jobs);

    std::vector<Json> rows;
    for (const auto& rec : result.records) {
        for (const auto& ins : rec.insights) rows.push_back(hierarchical_insight(rec.review.id, ins, taxonomy));
    }
    io::write_jsonl(a.out, rows);
    if (!a.delta.empty()) io::write_json(a.delta, result.delta);
    if (!a.records.empty()) io::write_jsonl_of(a.records, result.records);

    std::map<std::string, std::size_t> outcomes;
    for (const auto& per_bundle : result.decisions) {
        for (const auto& d : per_bundle) ++outcomes[std::string(to_string(d.outcome))];
    }
    log_stage(c, "postprocess",
              {{"bundles", bundles.size()},
               {"insights", rows.size()},
               {"outcomes", outcomes},
               {"delta_l4", result.delta.l4.size()},
               {"delta_new_l3", result.delta.new_l3.size()}});
}

void run_evaluate(const PipelineConfig& cfg, const CommonOptions& c, const EvaluateArgs& a) {
    if (!(a.sim_floor > 0.0 && a.sim_floor <= 1.0)) throw ValidationError("sim_floor", "must be in (0, 1]");
    const auto gold = io::read_jsonl_as<LabelledRecord>(a.gold);
    const auto pred = io::read_jsonl_as<LabelledRecord>(a.pred);
    Embedder emb(cfg);
    const Json all = config_to_json(cfg);
    Json thresholds{{"delta_p", cfg.sentiment.delta_p},
                    {"match", all.at("match")},
                    {"cluster", all.at("cluster")},
                    {"clean", all.at("clean")},
                    {"post", all.at("post")},
                    {"embedder", cfg.embeddings ? cfg.embeddings->string() : cfg.embedder}};
    const auto report = evaluate(gold, pred, emb.sim(), EvalOptions{a.l3_only, a.sim_floor}, std::move(thresholds));
    write_doc(a.report, report);
    log_stage(c, "evaluate",
              {{"reviews", report.reviews},
               {"micro_f1", report.topics.micro.f1},
               {"macro_f1", report.topics.macro.f1}});
}

void run_stats(const PipelineConfig&, const CommonOptions& c, const StatsArgs& a) {
    const auto records = io::read_jsonl_as<LabelledRecord>(a.records);
    EvalOptions opts;
    opts.l3_only = a.l3_only;
    std::size_t insights = 0, positive = 0, negative = 0, with_insights = 0;
    for (const auto& r : records) {
        insights += r.insights.size();
        if (!r.insights.empty()) ++with_insights;
        for (const auto& ins : r.insights) (ins.polarity == Polarity::Positive ? positive : negative) += 1;
    }
    const Json doc{{"records", records.size()},
                   {"records_with_insights", with_insights},
                   {"insights", insights},
                   {"positive", positive},
                   {"negative", negative},
                   {"distribution", topic_distribution(records, opts)}};
    write_doc(a.out, doc);
    log_stage(c, "stats", {{"records", records.size()}, {"insights", insights}});
}

void run_pipeline(const PipelineConfig& cfg, const CommonOptions& c, const PipelineArgs& a) {
    const auto reviews = io::read_reviews(a.reviews);
    const auto taxonomy = io::read_taxonomy(a.taxonomy);
    const auto records = label_corpus(cfg, c, reviews, taxonomy);
    io::write_jsonl_of(a.out, records);
    std::size_t pairs = 0;
    if (!a.pairs.empty()) {
        const auto rows = training_rows(records, cfg.templates);
        pairs = rows.size();
        io::write_jsonl(a.pairs, rows);
    }
    log_stage(c, "pipeline", {{"records", records.size()}, {"pairs", pairs}});
}

}  // namespace reviewlens::cli
