#include "reviewlens/model.hpp"

#include <map>
#include <set>
#include <utility>

#include "reviewlens/error.hpp"
#include "reviewlens/text.hpp"

namespace reviewlens {

std::string_view to_string(Polarity p) noexcept {
    switch (p) {
        case Polarity::Positive: return "positive";
        case Polarity::Negative: return "negative";
        case Polarity::Neutral: return "neutral";
    }
    return "neutral";
}

Polarity parse_polarity(std::string_view s) {
    if (text::iequals(s, "positive")) return Polarity::Positive;
    if (text::iequals(s, "negative")) return Polarity::Negative;
    if (text::iequals(s, "neutral")) return Polarity::Neutral;
    throw DataError("unknown polarity '" + std::string(s) + "'");
}

std::string_view to_string(TopicLevel l) noexcept { return l == TopicLevel::L3 ? "L3" : "L4"; }

TopicLevel parse_level(std::string_view s) {
    if (s == "L3") return TopicLevel::L3;
    if (s == "L4") return TopicLevel::L4;
    throw DataError("unknown topic level '" + std::string(s) + "'");
}

std::string_view to_string(Provenance p) noexcept {
    switch (p) {
        case Provenance::Matched: return "matched";
        case Provenance::GeneratedExisting: return "generated_existing";
        case Provenance::GeneratedL4: return "generated_l4";
        case Provenance::GeneratedNewL3: return "generated_new_l3";
    }
    return "matched";
}

Provenance parse_provenance(std::string_view s) {
    if (s == "matched") return Provenance::Matched;
    if (s == "generated_existing") return Provenance::GeneratedExisting;
    if (s == "generated_l4") return Provenance::GeneratedL4;
    if (s == "generated_new_l3") return Provenance::GeneratedNewL3;
    throw DataError("unknown provenance '" + std::string(s) + "'");
}

std::string topic_slug(std::string_view name, Polarity polarity) {
    std::string slug = text::join(text::tokens(name), "-");
    switch (polarity) {
        case Polarity::Positive: slug += ".pos"; break;
        case Polarity::Negative: slug += ".neg"; break;
        case Polarity::Neutral: slug += ".neu"; break;
    }
    return slug;
}

const GranularTopic* Taxonomy::find(std::string_view id) const noexcept {
    for (const auto& t : topics) {
        if (t.id == id) return &t;
    }
    return nullptr;
}

std::vector<TaxonomyViolation> validate_taxonomy(const Taxonomy& t) {
    std::vector<TaxonomyViolation> out;
    auto report = [&](const GranularTopic& topic, std::string rule, std::string message) {
        out.push_back({topic.id, std::move(rule), std::move(message)});
    };

    std::map<std::string, const GranularTopic*> by_id;
    std::map<std::pair<std::string, Polarity>, const GranularTopic*> by_name;
    std::map<std::string, std::string> hinge_owner;

    for (const auto& topic : t.topics) {
        if (topic.id.empty()) report(topic, "empty-id", "topic has no id");
        if (text::trim(topic.name).empty()) report(topic, "empty-name", "topic has no name");
        if (topic.polarity == Polarity::Neutral) {
            report(topic, "neutral-polarity", "topics must be positive or negative");
        }

        const auto name_key = std::make_pair(text::lower(text::trim(topic.name)), topic.polarity);
        const auto [name_it, name_fresh] = by_name.emplace(name_key, &topic);
        if (!name_fresh) {
            report(topic, "duplicate-name",
                   "(" + topic.name + ", " + std::string(to_string(topic.polarity)) +
                       ") already used by topic " + name_it->second->id);
        }
        const auto [id_it, id_fresh] = by_id.emplace(topic.id, &topic);
        // A repeated slug is the same defect as the repeated name; report it once.
        if (!id_fresh && name_fresh) {
            report(topic, "duplicate-id", "id already used by another topic");
        }

        if (topic.level == TopicLevel::L3) {
            if (topic.parent_l3) report(topic, "l3-has-parent", "L3 topics must not name a parent");
            if (topic.keywords.empty()) report(topic, "empty-keywords", "L3 topic has no keywords");
        }

        if (!topic.hinge.empty() || !topic.coarse.empty()) {
            const auto [owner, fresh] = hinge_owner.emplace(topic.hinge, topic.coarse);
            if (!fresh && owner->second != topic.coarse) {
                report(topic, "hinge-coarse-conflict",
                       "hinge '" + topic.hinge + "' is under coarse '" + owner->second +
                           "' and '" + topic.coarse + "'");
            }
        }
    }

    for (const auto& topic : t.topics) {
        if (topic.level != TopicLevel::L4) continue;
        if (!topic.parent_l3) {
            report(topic, "l4-missing-parent", "L4 topic has no parent_l3");
            continue;
        }
        const auto parent = by_id.find(*topic.parent_l3);
        if (parent == by_id.end()) {
            report(topic, "l4-dangling-parent", "parent '" + *topic.parent_l3 + "' does not exist");
        } else if (parent->second->level != TopicLevel::L3) {
            report(topic, "l4-parent-not-l3", "parent '" + *topic.parent_l3 + "' is not an L3 topic");
        }
    }
    return out;
}

}  // namespace reviewlens
