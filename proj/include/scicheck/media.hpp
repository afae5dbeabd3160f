#pragma once

#include "scicheck/triple.hpp"

#include <nlohmann/json.hpp>

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

namespace scicheck {

struct Date {
    int year = 0;
    int month = 0;
    int day = 0;

    // Strict `YYYY-MM-DD` with a real calendar day; throws ValidationError(field).
    static Date parse(std::string_view text, std::string_view field = "date");
    std::string str() const;

    friend auto operator<=>(const Date&, const Date&) = default;
};

enum class MediaKind { Video, Podcast, Article, Document };

std::string_view to_string(MediaKind kind);
// Case-insensitive; throws ValidationError("media_kind") on unknown names.
MediaKind parse_media_kind(std::string_view text);

struct MediaItem {
    MediaId id;
    std::string title;
    MediaKind media_kind = MediaKind::Video;
    std::string language;
    std::int64_t duration_seconds = 0;  // 0 = unknown
    std::optional<Date> publication_date;
    std::optional<std::string> publisher;
    std::set<std::string> topics;  // normalized like terms
    std::optional<std::string> license;
    std::optional<std::string> source_url;
    std::optional<std::string> transcript_ref;
    std::map<std::string, std::string> extra;  // ignored by filters

    // Normalizes topics and checks invariants; throws ValidationError.
    void validate();

    friend bool operator==(const MediaItem&, const MediaItem&) = default;
};

// Unset fields do not constrain. Date bounds are exclusive ("after"/"before"),
// duration bounds inclusive; unknown duration (0) never satisfies a minimum.
struct MediaFilter {
    std::optional<std::string> title_contains;
    std::optional<std::string> topic;
    std::optional<std::string> publisher;
    std::optional<Date> published_after;
    std::optional<Date> published_before;
    std::optional<std::int64_t> min_duration_seconds;
    std::optional<std::int64_t> max_duration_seconds;
    std::optional<std::string> language;  // BCP-47 prefix: "en" matches "en-GB"
    std::optional<MediaKind> media_kind;

    bool any_set() const;
    // Throws ValidationError on an empty filter or an inverted range.
    void validate() const;
    bool matches(const MediaItem& item) const;
};

// Ordering of filter results: newest first (undated last), then title, then id.
bool media_result_order(const MediaItem& a, const MediaItem& b);

struct RegisterOutcome {
    MediaId id;
    bool updated = false;
};

// Thread-safe registry: concurrent readers, serialized writers.
class MediaRegistry {
public:
    RegisterOutcome register_media(MediaItem item);
    std::optional<MediaItem> get(const MediaId& id) const;
    std::vector<MediaItem> filter(const MediaFilter& f) const;
    std::vector<MediaItem> all() const;
    std::size_t size() const;

private:
    mutable std::shared_mutex mu_;
    std::map<MediaId, MediaItem> items_;
    std::map<std::string, std::set<MediaId>> by_topic_;
};

void to_json(nlohmann::json& j, const MediaItem& item);
// Throws ValidationError naming the field.
MediaItem media_from_json(const nlohmann::json& j);
// Media import file: JSON array of MediaItem objects.
std::vector<MediaItem> import_media_json(std::string_view text);

}  // namespace scicheck
