#include "reviewlens/config.hpp"

#include <set>

#include "reviewlens/error.hpp"

namespace reviewlens {

void PipelineConfig::validate() const {
    segmenter.validate();
    sentiment.validate();
    if (!(sentiment_source.lexicon_gain > 0.0)) throw ValidationError("sentiment.lexicon_gain", "must be > 0");
    match.validate();
    cluster.validate();
    clean.validate();
    post.validate();
    templates.validate();
    if (jobs == 0) throw ValidationError("jobs", "must be >= 1");
    if (!embeddings) provider_from_spec(embedder);
}

namespace {

class Reader {
public:
    Reader(const Json& j, std::string prefix) : j_(j), prefix_(std::move(prefix)) {
        if (!j_.is_object()) throw ValidationError(prefix_.empty() ? "config" : prefix_, "must be a JSON object");
    }

    void reject_unknown() const {
        for (const auto& [key, _] : j_.items()) {
            if (!used_.count(key)) throw ValidationError(field(key), "unknown key");
        }
    }

    std::string field(const std::string& key) const { return prefix_.empty() ? key : prefix_ + "." + key; }

    const Json* get(const std::string& key) {
        used_.insert(key);
        const auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    void number(const std::string& key, double& out) {
        if (const Json* v = get(key)) {
            if (!v->is_number()) throw ValidationError(field(key), "must be a number");
            out = v->get<double>();
        }
    }

    void count(const std::string& key, std::size_t& out) {
        if (const Json* v = get(key)) {
            if (!v->is_number_integer() || v->get<long long>() < 0) {
                throw ValidationError(field(key), "must be a non-negative integer");
            }
            out = v->get<std::size_t>();
        }
    }

    void u64(const std::string& key, std::uint64_t& out) {
        if (const Json* v = get(key)) {
            if (!v->is_number_unsigned()) throw ValidationError(field(key), "must be a non-negative integer");
            out = v->get<std::uint64_t>();
        }
    }

    void string(const std::string& key, std::string& out) {
        if (const Json* v = get(key)) {
            if (!v->is_string()) throw ValidationError(field(key), "must be a string");
            out = v->get<std::string>();
        }
    }

    void strings(const std::string& key, std::vector<std::string>& out) {
        if (const Json* v = get(key)) {
            if (!v->is_array()) throw ValidationError(field(key), "must be an array of strings");
            out.clear();
            for (const auto& e : *v) {
                if (!e.is_string()) throw ValidationError(field(key), "must be an array of strings");
                out.push_back(e.get<std::string>());
            }
        }
    }

    void path(const std::string& key, std::optional<std::filesystem::path>& out, const std::filesystem::path& base) {
        if (const Json* v = get(key)) {
            if (v->is_null()) {
                out.reset();
                return;
            }
            if (!v->is_string()) throw ValidationError(field(key), "must be a path string");
            std::filesystem::path p = v->get<std::string>();
            out = p.is_relative() && !base.empty() ? base / p : p;
        }
    }

    template <typename Fn>
    void section(const std::string& key, Fn fn) {
        if (const Json* v = get(key)) {
            Reader sub(*v, field(key));
            fn(sub);
            sub.reject_unknown();
        }
    }

private:
    const Json& j_;
    std::string prefix_;
    std::set<std::string> used_;
};

}  // namespace

PipelineConfig config_from_json(const Json& j, const std::filesystem::path& base_dir) {
    PipelineConfig c;
    Reader r(j, "");
    r.section("segmenter", [&](Reader& s) {
        s.strings("sentence_delimiters", c.segmenter.sentence_delimiters);
        s.strings("phrase_delimiters", c.segmenter.phrase_delimiters);
        s.count("min_phrase_words", c.segmenter.min_phrase_words);
    });
    r.section("sentiment", [&](Reader& s) {
        s.number("delta_p", c.sentiment.delta_p);
        s.path("lexicon", c.sentiment_source.lexicon, base_dir);
        s.path("scores", c.sentiment_source.scores, base_dir);
        s.number("lexicon_gain", c.sentiment_source.lexicon_gain);
    });
    r.section("match", [&](Reader& s) {
        s.count("k", c.match.k);
        s.number("delta_h", c.match.delta_h);
        s.number("delta_m", c.match.delta_m);
        s.number("delta_avg", c.match.delta_avg);
    });
    r.section("cluster", [&](Reader& s) {
        s.number("sim_threshold", c.cluster.sim_threshold);
        s.count("min_cluster_size", c.cluster.min_cluster_size);
    });
    r.section("clean", [&](Reader& s) {
        s.number("delta_intra", c.clean.delta_intra);
        s.number("delta_e", c.clean.delta_e);
    });
    r.section("post", [&](Reader& s) {
        s.number("exact_replace", c.post.exact_replace);
        s.number("l4_topic", c.post.l4_topic);
        s.number("l4_verbatim", c.post.l4_verbatim);
    });
    r.section("templates", [&](Reader& s) {
        s.string("topic_q", c.templates.topic_q);
        s.string("polarity_q", c.templates.polarity_q);
        s.string("verbatim_q", c.templates.verbatim_q);
    });
    r.string("embedder", c.embedder);
    r.path("embeddings", c.embeddings, base_dir);
    r.u64("seed", c.seed);
    r.count("jobs", c.jobs);
    r.count("augment", c.augment);
    r.reject_unknown();
    c.validate();
    return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    return config_from_json(io::read_json(path), path.parent_path());
}

Json config_to_json(const PipelineConfig& c) {
    auto opt_path = [](const std::optional<std::filesystem::path>& p) { return p ? Json(p->string()) : Json(nullptr); };
    return Json{
        {"segmenter",
         {{"sentence_delimiters", c.segmenter.sentence_delimiters},
          {"phrase_delimiters", c.segmenter.phrase_delimiters},
          {"min_phrase_words", c.segmenter.min_phrase_words}}},
        {"sentiment",
         {{"delta_p", c.sentiment.delta_p},
          {"lexicon", opt_path(c.sentiment_source.lexicon)},
          {"scores", opt_path(c.sentiment_source.scores)},
          {"lexicon_gain", c.sentiment_source.lexicon_gain}}},
        {"match",
         {{"k", c.match.k}, {"delta_h", c.match.delta_h}, {"delta_m", c.match.delta_m}, {"delta_avg", c.match.delta_avg}}},
        {"cluster", {{"sim_threshold", c.cluster.sim_threshold}, {"min_cluster_size", c.cluster.min_cluster_size}}},
        {"clean", {{"delta_intra", c.clean.delta_intra}, {"delta_e", c.clean.delta_e}}},
        {"post",
         {{"exact_replace", c.post.exact_replace}, {"l4_topic", c.post.l4_topic}, {"l4_verbatim", c.post.l4_verbatim}}},
        {"templates",
         {{"topic_q", c.templates.topic_q}, {"polarity_q", c.templates.polarity_q}, {"verbatim_q", c.templates.verbatim_q}}},
        {"embedder", c.embedder},
        {"embeddings", opt_path(c.embeddings)},
        {"seed", c.seed},
        {"jobs", c.jobs},
        {"augment", c.augment},
    };
}

std::unique_ptr<EmbeddingProvider> make_provider(const PipelineConfig& cfg) {
    if (cfg.embeddings) return load_precomputed_provider(*cfg.embeddings);
    return provider_from_spec(cfg.embedder);
}

std::unique_ptr<SentimentClassifier> make_classifier(const PipelineConfig& cfg) {
    const auto& src = cfg.sentiment_source;
    if (src.scores) return load_scores_classifier(*src.scores);
    if (src.lexicon) return lexicon_classifier(*src.lexicon, src.lexicon_gain);
    throw ValidationError("sentiment.lexicon", "a lexicon or scores file is required");
}

}  // namespace reviewlens
