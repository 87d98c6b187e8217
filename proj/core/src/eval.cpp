#include "reviewlens/eval.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

#include "reviewlens/error.hpp"
#include "reviewlens/text.hpp"

namespace reviewlens {

PRF prf_from_counts(std::size_t tp, std::size_t fp, std::size_t fn) noexcept {
    if (tp + fp + fn == 0) return {1.0, 1.0, 1.0};
    PRF out;
    if (tp + fp > 0) out.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    if (tp + fn > 0) out.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    if (out.precision + out.recall > 0) out.f1 = 2 * out.precision * out.recall / (out.precision + out.recall);
    return out;
}

std::vector<EvalPair> align_records(std::span<const LabelledRecord> gold, std::span<const LabelledRecord> pred,
                                    std::size_t* unmatched_predictions) {
    std::unordered_map<std::string, const LabelledRecord*> by_id;
    for (const auto& p : pred) {
        if (!by_id.emplace(p.review.id, &p).second) throw DataError("duplicate predicted review id '" + p.review.id + "'");
    }
    std::set<std::string> seen;
    std::vector<EvalPair> out;
    out.reserve(gold.size());
    for (const auto& g : gold) {
        if (!seen.insert(g.review.id).second) throw DataError("duplicate gold review id '" + g.review.id + "'");
        const auto it = by_id.find(g.review.id);
        out.push_back({&g, it == by_id.end() ? nullptr : it->second});
    }
    if (unmatched_predictions) {
        *unmatched_predictions = static_cast<std::size_t>(
            std::count_if(pred.begin(), pred.end(), [&](const LabelledRecord& p) { return !seen.count(p.review.id); }));
    }
    return out;
}

std::string insight_label(const Insight& ins, const EvalOptions& opts) {
    const std::string& name = opts.l3_only ? ins.l3_name() : ins.topic;
    return text::lower(text::trim(name)) + "|" + std::string(to_string(ins.polarity));
}

namespace {

// Label -> verbatims of every insight carrying it.
std::map<std::string, std::vector<std::string>> labels_of(const LabelledRecord* rec, const EvalOptions& opts) {
    std::map<std::string, std::vector<std::string>> out;
    if (!rec) return out;
    for (const auto& ins : rec->insights) {
        auto& v = out[insight_label(ins, opts)];
        v.insert(v.end(), ins.verbatims.begin(), ins.verbatims.end());
    }
    return out;
}

}  // namespace

TopicScores topic_scores(std::span<const EvalPair> pairs, const EvalOptions& opts) {
    TopicScores s;
    for (const auto& p : pairs) {
        const auto gold = labels_of(p.gold, opts);
        const auto pred = labels_of(p.pred, opts);
        for (const auto& [label, _] : gold) {
            auto& ls = s.per_label[label];
            if (pred.count(label)) {
                ++ls.tp;
                ++s.tp;
            } else {
                ++ls.fn;
                ++s.fn;
            }
        }
        for (const auto& [label, _] : pred) {
            if (gold.count(label)) continue;
            ++s.per_label[label].fp;
            ++s.fp;
        }
    }
    s.micro = prf_from_counts(s.tp, s.fp, s.fn);

    PRF sum;
    std::size_t n = 0;
    for (auto& [label, ls] : s.per_label) {
        ls.prf = prf_from_counts(ls.tp, ls.fp, ls.fn);
        if (ls.tp + ls.fn == 0) continue;
        sum.precision += ls.prf.precision;
        sum.recall += ls.prf.recall;
        sum.f1 += ls.prf.f1;
        ++n;
    }
    if (n == 0) {
        s.macro = s.micro;
    } else {
        const auto d = static_cast<double>(n);
        s.macro = {sum.precision / d, sum.recall / d, sum.f1 / d};
    }
    return s;
}

namespace {

bool verbatims_agree(const std::string& a, const std::string& b, const Similarity& sim, double floor) {
    const auto la = text::lower(text::trim(a));
    const auto lb = text::lower(text::trim(b));
    if (la.empty() || lb.empty()) return false;
    if (la.find(lb) != std::string::npos || lb.find(la) != std::string::npos) return true;
    return sim(a, b) >= floor;
}

double share_found(const std::vector<std::string>& from, const std::vector<std::string>& in, const Similarity& sim,
                   double floor) {
    if (from.empty()) return 0.0;
    std::size_t found = 0;
    for (const auto& v : from) {
        if (std::any_of(in.begin(), in.end(), [&](const std::string& w) { return verbatims_agree(v, w, sim, floor); })) {
            ++found;
        }
    }
    return static_cast<double>(found) / static_cast<double>(from.size());
}

}  // namespace

VerbatimScores verbatim_scores(std::span<const EvalPair> pairs, const Similarity& sim, const EvalOptions& opts) {
    VerbatimScores out;
    double correct = 0.0, complete = 0.0;
    for (const auto& p : pairs) {
        const auto gold = labels_of(p.gold, opts);
        const auto pred = labels_of(p.pred, opts);
        for (const auto& [label, gv] : gold) {
            const auto it = pred.find(label);
            if (it == pred.end()) continue;
            ++out.topics;
            correct += share_found(it->second, gv, sim, opts.sim_floor);
            complete += share_found(gv, it->second, sim, opts.sim_floor);
        }
    }
    if (out.topics > 0) {
        out.correctness = correct / static_cast<double>(out.topics);
        out.completeness = complete / static_cast<double>(out.topics);
    }
    return out;
}

double TopicDistribution::coverage_at(double percent) const {
    if (counts.empty()) return 0.0;
    const auto want = static_cast<std::size_t>(std::ceil(percent / 100.0 * static_cast<double>(counts.size()) - 1e-9));
    const std::size_t top = std::clamp<std::size_t>(want, 1, counts.size());
    return cumulative[top - 1];
}

TopicDistribution topic_distribution(const std::map<std::string, std::size_t>& counts) {
    TopicDistribution d;
    for (const auto& [name, c] : counts) {
        if (c == 0) continue;
        d.counts.emplace_back(name, c);
        d.total += c;
    }
    std::stable_sort(d.counts.begin(), d.counts.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    std::size_t running = 0;
    for (const auto& [_, c] : d.counts) {
        running += c;
        d.cumulative.push_back(static_cast<double>(running) / static_cast<double>(d.total));
    }
    if (!d.cumulative.empty()) d.cumulative.back() = 1.0;
    return d;
}

TopicDistribution topic_distribution(std::span<const LabelledRecord> records, const EvalOptions& opts) {
    std::map<std::string, std::size_t> counts;
    for (const auto& r : records) {
        for (const auto& ins : r.insights) ++counts[insight_label(ins, opts)];
    }
    return topic_distribution(counts);
}

MetricReport evaluate(std::span<const LabelledRecord> gold, std::span<const LabelledRecord> pred,
                      const Similarity& sim, const EvalOptions& opts, Json thresholds) {
    MetricReport r;
    const auto pairs = align_records(gold, pred, &r.unmatched_predictions);
    r.reviews = pairs.size();
    r.topics = topic_scores(pairs, opts);
    r.verbatims = verbatim_scores(pairs, sim, opts);
    r.gold_distribution = topic_distribution(gold, opts);
    r.pred_distribution = topic_distribution(pred, opts);
    r.thresholds = std::move(thresholds);
    r.thresholds["verbatim_sim_floor"] = opts.sim_floor;
    return r;
}

void to_json(Json& j, const PRF& p) { j = Json{{"precision", p.precision}, {"recall", p.recall}, {"f1", p.f1}}; }

void to_json(Json& j, const TopicDistribution& d) {
    Json counts = Json::array();
    for (const auto& [name, c] : d.counts) counts.push_back(Json{{"topic", name}, {"count", c}});
    Json coverage = Json::object();
    for (double pct : kCoveragePoints) {
        // Keys such as "12%".
        coverage[std::to_string(static_cast<int>(pct)) + "%"] = d.coverage_at(pct);
    }
    j = Json{{"topics", d.counts.size()}, {"insights", d.total}, {"coverage", coverage}, {"counts", counts}};
}

void to_json(Json& j, const MetricReport& r) {
    Json per_label = Json::object();
    for (const auto& [label, ls] : r.topics.per_label) {
        per_label[label] = Json{{"tp", ls.tp}, {"fp", ls.fp}, {"fn", ls.fn}, {"f1", ls.prf.f1}};
    }
    auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
    j = Json{{"reviews", r.reviews},
             {"unmatched_predictions", r.unmatched_predictions},
             {"topics",
              {{"tp", r.topics.tp},
               {"fp", r.topics.fp},
               {"fn", r.topics.fn},
               {"micro", r.topics.micro},
               {"macro", r.topics.macro},
               {"per_label", per_label}}},
             {"verbatims",
              {{"topics", r.verbatims.topics},
               {"correctness", opt(r.verbatims.correctness)},
               {"completeness", opt(r.verbatims.completeness)}}},
             {"distribution", {{"gold", r.gold_distribution}, {"pred", r.pred_distribution}}},
             {"thresholds", r.thresholds}};
}

}  // namespace reviewlens
