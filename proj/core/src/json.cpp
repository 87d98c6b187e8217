#include "reviewlens/json.hpp"

#include <fstream>
#include <sstream>

#include "reviewlens/error.hpp"
#include "reviewlens/text.hpp"

namespace reviewlens {
namespace {

const Json& field(const Json& j, const char* key) {
    if (!j.is_object()) throw DataError(std::string("expected an object while reading '") + key + "'");
    const auto it = j.find(key);
    if (it == j.end()) throw DataError(std::string("missing field '") + key + "'");
    return *it;
}

std::string string_field(const Json& j, const char* key) {
    const Json& v = field(j, key);
    if (!v.is_string()) throw DataError(std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
}

std::optional<std::string> optional_string(const Json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) throw DataError(std::string("field '") + key + "' must be a string");
    return it->get<std::string>();
}

std::vector<std::string> string_list(const Json& j, const char* key) {
    const Json& v = field(j, key);
    if (!v.is_array()) throw DataError(std::string("field '") + key + "' must be an array");
    std::vector<std::string> out;
    out.reserve(v.size());
    for (const auto& item : v) {
        if (!item.is_string()) throw DataError(std::string("field '") + key + "' must hold strings");
        out.push_back(item.get<std::string>());
    }
    return out;
}

double number_field(const Json& j, const char* key) {
    const Json& v = field(j, key);
    if (!v.is_number()) throw DataError(std::string("field '") + key + "' must be a number");
    return v.get<double>();
}

std::size_t index_field(const Json& j, const char* key) {
    const Json& v = field(j, key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
        throw DataError(std::string("field '") + key + "' must be a non-negative integer");
    }
    return v.get<std::size_t>();
}

}  // namespace

void to_json(Json& j, const Review& r) {
    j = Json{{"id", r.id}, {"text", r.text}};
    if (r.category) j["category"] = *r.category;
}

void from_json(const Json& j, Review& r) {
    r.id = string_field(j, "id");
    r.text = string_field(j, "text");
    r.category = optional_string(j, "category");
}

void to_json(Json& j, const Segment& s) {
    j = Json{{"review_id", s.review_id}, {"text", s.text}, {"start", s.span.start}, {"end", s.span.end}};
    if (s.polarity) {
        j["polarity"] = to_string(*s.polarity);
        j["pos_score"] = s.pos_score;
        j["neg_score"] = s.neg_score;
    }
}

void from_json(const Json& j, Segment& s) {
    s.review_id = string_field(j, "review_id");
    s.text = string_field(j, "text");
    s.span.start = index_field(j, "start");
    s.span.end = index_field(j, "end");
    if (s.span.end < s.span.start) throw DataError("segment span end precedes start");
    const auto pol = optional_string(j, "polarity");
    s.polarity = pol ? std::optional(parse_polarity(*pol)) : std::nullopt;
    s.pos_score = j.contains("pos_score") ? number_field(j, "pos_score") : 0.0;
    s.neg_score = j.contains("neg_score") ? number_field(j, "neg_score") : 0.0;
}

void to_json(Json& j, const GranularTopic& t) {
    j = Json{{"id", t.id},
             {"name", t.name},
             {"hinge", t.hinge},
             {"coarse", t.coarse},
             {"polarity", to_string(t.polarity)},
             {"keywords", t.keywords},
             {"level", to_string(t.level)}};
    if (t.parent_l3) j["parent_l3"] = *t.parent_l3;
}

void from_json(const Json& j, GranularTopic& t) {
    t.name = string_field(j, "name");
    t.polarity = parse_polarity(string_field(j, "polarity"));
    t.id = optional_string(j, "id").value_or(topic_slug(t.name, t.polarity));
    t.hinge = optional_string(j, "hinge").value_or("");
    t.coarse = optional_string(j, "coarse").value_or("");
    t.keywords = j.contains("keywords") ? string_list(j, "keywords") : std::vector<std::string>{};
    t.level = parse_level(optional_string(j, "level").value_or("L3"));
    t.parent_l3 = optional_string(j, "parent_l3");
}

void to_json(Json& j, const Taxonomy& t) {
    j = Json{{"version", t.version}, {"topics", t.topics}};
}

void from_json(const Json& j, Taxonomy& t) {
    const Json& v = field(j, "version");
    if (!v.is_number_integer()) throw DataError("field 'version' must be an integer");
    t.version = v.get<int>();
    const Json& topics = field(j, "topics");
    if (!topics.is_array()) throw DataError("field 'topics' must be an array");
    t.topics.clear();
    for (const auto& item : topics) t.topics.push_back(item.get<GranularTopic>());
}

void to_json(Json& j, const Insight& i) {
    j = Json{{"topic", i.topic},
             {"polarity", to_string(i.polarity)},
             {"verbatims", i.verbatims},
             {"provenance", to_string(i.provenance)}};
    if (i.topic_id) j["topic_id"] = *i.topic_id;
    if (i.parent_topic) j["parent_topic"] = *i.parent_topic;
}

void from_json(const Json& j, Insight& i) {
    i.topic = string_field(j, "topic");
    i.polarity = parse_polarity(string_field(j, "polarity"));
    i.verbatims = string_list(j, "verbatims");
    i.provenance = parse_provenance(optional_string(j, "provenance").value_or("matched"));
    i.topic_id = optional_string(j, "topic_id");
    i.parent_topic = optional_string(j, "parent_topic");
}

void to_json(Json& j, const LabelledRecord& r) {
    j = Json{{"review", r.review}, {"insights", r.insights}};
}

void from_json(const Json& j, LabelledRecord& r) {
    r.review = field(j, "review").get<Review>();
    const Json& insights = field(j, "insights");
    if (!insights.is_array()) throw DataError("field 'insights' must be an array");
    r.insights.clear();
    for (const auto& item : insights) r.insights.push_back(item.get<Insight>());
}

namespace io {

namespace {

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    return out;
}

}  // namespace

void for_each_jsonl(const std::filesystem::path& path,
                    const std::function<void(const Json&, std::size_t)>& fn) {
    auto in = open_in(path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (text::trim(line).empty()) continue;
        Json j;
        try {
            j = Json::parse(line);
        } catch (const Json::parse_error& e) {
            throw DataError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
        try {
            fn(j, lineno);
        } catch (const ValidationError&) {
            throw;
        } catch (const DataError& e) {
            throw DataError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        } catch (const Json::exception& e) {
            throw DataError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
}

std::vector<Json> read_jsonl(const std::filesystem::path& path) {
    std::vector<Json> rows;
    for_each_jsonl(path, [&](const Json& j, std::size_t) { rows.push_back(j); });
    return rows;
}

void write_jsonl(const std::filesystem::path& path, const std::vector<Json>& rows) {
    auto out = open_out(path);
    for (const auto& row : rows) out << row.dump() << '\n';
    if (!out) throw DataError("write failed for '" + path.string() + "'");
}

Json read_json(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return Json::parse(buf.str());
    } catch (const Json::parse_error& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

void write_json(const std::filesystem::path& path, const Json& doc) {
    auto out = open_out(path);
    out << doc.dump(2) << '\n';
    if (!out) throw DataError("write failed for '" + path.string() + "'");
}

std::vector<Review> read_reviews(const std::filesystem::path& path) {
    std::vector<Review> out;
    for_each_jsonl(path, [&](const Json& j, std::size_t) {
        auto r = j.get<Review>();
        if (text::trim(r.text).empty()) throw DataError("review '" + r.id + "' has empty text");
        out.push_back(std::move(r));
    });
    return out;
}

Taxonomy read_taxonomy(const std::filesystem::path& path) {
    const Json doc = read_json(path);
    try {
        return doc.get<Taxonomy>();
    } catch (const Json::exception& e) {
        throw DataError(path.string() + ": " + e.what());
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

}  // namespace io
}  // namespace reviewlens
