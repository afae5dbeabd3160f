#include "scicheck/media.hpp"

#include "scicheck/error.hpp"
#include "scicheck/term.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <mutex>

namespace scicheck {

using json = nlohmann::json;

Date Date::parse(std::string_view text, std::string_view field) {
    auto bad = [&] { return ValidationError(std::string(field), "expected YYYY-MM-DD, got '" + std::string(text) + "'"); };
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') throw bad();
    for (std::size_t i : {0, 1, 2, 3, 5, 6, 8, 9}) {
        if (!std::isdigit(static_cast<unsigned char>(text[i]))) throw bad();
    }
    auto num = [&](std::size_t pos, std::size_t len) {
        int v = 0;
        for (std::size_t i = pos; i < pos + len; ++i) v = v * 10 + (text[i] - '0');
        return v;
    };
    Date d{num(0, 4), num(5, 2), num(8, 2)};
    std::chrono::year_month_day ymd{std::chrono::year{d.year}, std::chrono::month{static_cast<unsigned>(d.month)},
                                    std::chrono::day{static_cast<unsigned>(d.day)}};
    if (!ymd.ok()) throw bad();
    return d;
}

std::string Date::str() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
    return buf;
}

std::string_view to_string(MediaKind kind) {
    switch (kind) {
        case MediaKind::Video: return "Video";
        case MediaKind::Podcast: return "Podcast";
        case MediaKind::Article: return "Article";
        case MediaKind::Document: return "Document";
    }
    return "Video";
}

MediaKind parse_media_kind(std::string_view text) {
    const std::string k = normalize_text(text);
    if (k == "video") return MediaKind::Video;
    if (k == "podcast") return MediaKind::Podcast;
    if (k == "article") return MediaKind::Article;
    if (k == "document") return MediaKind::Document;
    throw ValidationError("media_kind", "unknown kind '" + std::string(text) + "'");
}

void MediaItem::validate() {
    id = collapse_whitespace(id);
    if (id.empty()) throw ValidationError("id", "must be non-empty");
    if (collapse_whitespace(title).empty()) throw ValidationError("title", "must be non-empty");
    if (duration_seconds < 0) throw ValidationError("duration_seconds", "must be >= 0");
    std::set<std::string> normalized;
    for (const std::string& t : topics) {
        std::string n = normalize_text(t);
        if (!n.empty()) normalized.insert(std::move(n));
    }
    topics = std::move(normalized);
}

bool MediaFilter::any_set() const {
    return title_contains || topic || publisher || published_after || published_before ||
           min_duration_seconds || max_duration_seconds || language || media_kind;
}

void MediaFilter::validate() const {
    if (!any_set()) throw ValidationError("filter", "at least one criterion must be set");
    if (published_after && published_before && *published_after >= *published_before) {
        throw ValidationError("published_after", "date range is inverted or empty");
    }
    if (min_duration_seconds && max_duration_seconds && *min_duration_seconds > *max_duration_seconds) {
        throw ValidationError("min_duration_seconds", "duration range is inverted");
    }
}

namespace {

bool language_matches(std::string_view wanted, std::string_view tag) {
    const std::string w = normalize_text(wanted);
    const std::string t = normalize_text(tag);
    return t == w || (t.size() > w.size() && t.compare(0, w.size(), w) == 0 && t[w.size()] == '-');
}

}  // namespace

bool MediaFilter::matches(const MediaItem& item) const {
    if (media_kind && item.media_kind != *media_kind) return false;
    if (topic && !item.topics.contains(normalize_text(*topic))) return false;
    if (publisher && (!item.publisher || normalize_text(*item.publisher) != normalize_text(*publisher))) return false;
    if (language && !language_matches(*language, item.language)) return false;
    if (title_contains && normalize_text(item.title).find(normalize_text(*title_contains)) == std::string::npos) {
        return false;
    }
    if (published_after || published_before) {
        if (!item.publication_date) return false;
        if (published_after && !(*item.publication_date > *published_after)) return false;
        if (published_before && !(*item.publication_date < *published_before)) return false;
    }
    if (min_duration_seconds && (item.duration_seconds == 0 || item.duration_seconds < *min_duration_seconds)) {
        return false;
    }
    if (max_duration_seconds && item.duration_seconds > *max_duration_seconds) return false;
    return true;
}

bool media_result_order(const MediaItem& a, const MediaItem& b) {
    if (a.publication_date != b.publication_date) {
        if (!a.publication_date) return false;
        if (!b.publication_date) return true;
        return *a.publication_date > *b.publication_date;
    }
    if (a.title != b.title) return a.title < b.title;
    return a.id < b.id;
}

RegisterOutcome MediaRegistry::register_media(MediaItem item) {
    item.validate();
    std::unique_lock lock(mu_);
    RegisterOutcome out{item.id, false};
    auto it = items_.find(item.id);
    if (it != items_.end()) {
        out.updated = true;
        for (const auto& t : it->second.topics) by_topic_[t].erase(item.id);
    }
    for (const auto& t : item.topics) by_topic_[t].insert(item.id);
    items_.insert_or_assign(item.id, std::move(item));
    return out;
}

std::optional<MediaItem> MediaRegistry::get(const MediaId& id) const {
    std::shared_lock lock(mu_);
    auto it = items_.find(id);
    if (it == items_.end()) return std::nullopt;
    return it->second;
}

std::vector<MediaItem> MediaRegistry::filter(const MediaFilter& f) const {
    f.validate();
    std::vector<MediaItem> out;
    std::shared_lock lock(mu_);
    if (f.topic) {
        auto it = by_topic_.find(normalize_text(*f.topic));
        if (it != by_topic_.end()) {
            for (const MediaId& id : it->second) {
                const MediaItem& item = items_.at(id);
                if (f.matches(item)) out.push_back(item);
            }
        }
    } else {
        for (const auto& [id, item] : items_) {
            if (f.matches(item)) out.push_back(item);
        }
    }
    lock.unlock();
    std::sort(out.begin(), out.end(), media_result_order);
    return out;
}

std::vector<MediaItem> MediaRegistry::all() const {
    std::shared_lock lock(mu_);
    std::vector<MediaItem> out;
    for (const auto& [id, item] : items_) out.push_back(item);
    return out;
}

std::size_t MediaRegistry::size() const {
    std::shared_lock lock(mu_);
    return items_.size();
}

void to_json(json& j, const MediaItem& item) {
    j = json{{"id", item.id},
             {"title", item.title},
             {"media_kind", to_string(item.media_kind)},
             {"language", item.language},
             {"duration_seconds", item.duration_seconds},
             {"topics", item.topics}};
    j["publication_date"] = item.publication_date ? json(item.publication_date->str()) : json(nullptr);
    j["publisher"] = item.publisher ? json(*item.publisher) : json(nullptr);
    j["license"] = item.license ? json(*item.license) : json(nullptr);
    j["source_url"] = item.source_url ? json(*item.source_url) : json(nullptr);
    j["transcript_ref"] = item.transcript_ref ? json(*item.transcript_ref) : json(nullptr);
    j["extra"] = item.extra;
}

namespace {

std::optional<std::string> optional_string(const json& j, const char* field) {
    auto it = j.find(field);
    if (it == j.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) throw ValidationError(field, "must be a string");
    return it->get<std::string>();
}

std::string required_string(const json& j, const char* field) {
    auto v = optional_string(j, field);
    if (!v) throw ValidationError(field, "is required");
    return *v;
}

}  // namespace

MediaItem media_from_json(const json& j) {
    if (!j.is_object()) throw ValidationError("media", "must be a JSON object");
    MediaItem item;
    item.id = required_string(j, "id");
    item.title = required_string(j, "title");
    item.media_kind = parse_media_kind(required_string(j, "media_kind"));
    item.language = optional_string(j, "language").value_or("");
    if (auto it = j.find("duration_seconds"); it != j.end() && !it->is_null()) {
        if (!it->is_number_integer()) throw ValidationError("duration_seconds", "must be an integer");
        item.duration_seconds = it->get<std::int64_t>();
    }
    if (auto d = optional_string(j, "publication_date")) item.publication_date = Date::parse(*d, "publication_date");
    item.publisher = optional_string(j, "publisher");
    item.license = optional_string(j, "license");
    item.source_url = optional_string(j, "source_url");
    item.transcript_ref = optional_string(j, "transcript_ref");
    if (auto it = j.find("topics"); it != j.end() && !it->is_null()) {
        if (!it->is_array()) throw ValidationError("topics", "must be an array of strings");
        for (const json& t : *it) {
            if (!t.is_string()) throw ValidationError("topics", "must be an array of strings");
            item.topics.insert(t.get<std::string>());
        }
    }
    if (auto it = j.find("extra"); it != j.end() && !it->is_null()) {
        if (!it->is_object()) throw ValidationError("extra", "must be an object of strings");
        for (const auto& [k, v] : it->items()) {
            if (!v.is_string()) throw ValidationError("extra", "values must be strings");
            item.extra[k] = v.get<std::string>();
        }
    }
    item.validate();
    return item;
}

std::vector<MediaItem> import_media_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(std::string("media import: ") + e.what());
    }
    if (!doc.is_array()) throw ValidationError("media", "import file must be a JSON array");
    std::vector<MediaItem> out;
    out.reserve(doc.size());
    for (const json& j : doc) out.push_back(media_from_json(j));
    return out;
}

}  // namespace scicheck
