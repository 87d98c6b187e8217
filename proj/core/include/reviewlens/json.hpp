#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "reviewlens/model.hpp"

namespace reviewlens {

using Json = nlohmann::json;

// Wire formats. Decoders throw DataError on missing or mistyped fields.
void to_json(Json& j, const Review& r);
void from_json(const Json& j, Review& r);
void to_json(Json& j, const Segment& s);
void from_json(const Json& j, Segment& s);
void to_json(Json& j, const GranularTopic& t);
void from_json(const Json& j, GranularTopic& t);
void to_json(Json& j, const Taxonomy& t);
void from_json(const Json& j, Taxonomy& t);
void to_json(Json& j, const Insight& i);
void from_json(const Json& j, Insight& i);
void to_json(Json& j, const LabelledRecord& r);
void from_json(const Json& j, LabelledRecord& r);

namespace io {

/// Reads a JSON Lines file; blank lines are skipped. Errors carry the line number.
std::vector<Json> read_jsonl(const std::filesystem::path& path);
void for_each_jsonl(const std::filesystem::path& path, const std::function<void(const Json&, std::size_t line)>& fn);
void write_jsonl(const std::filesystem::path& path, const std::vector<Json>& rows);

Json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& doc);

template <class T>
std::vector<T> read_jsonl_as(const std::filesystem::path& path) {
    std::vector<T> out;
    for_each_jsonl(path, [&](const Json& j, std::size_t) { out.push_back(j.get<T>()); });
    return out;
}

template <class T>
void write_jsonl_of(const std::filesystem::path& path, const std::vector<T>& items) {
    std::vector<Json> rows;
    rows.reserve(items.size());
    for (const auto& item : items) rows.emplace_back(item);
    write_jsonl(path, rows);
}

/// Reviews with empty (after trimming) text are rejected with DataError.
std::vector<Review> read_reviews(const std::filesystem::path& path);
Taxonomy read_taxonomy(const std::filesystem::path& path);

}  // namespace io
}  // namespace reviewlens
