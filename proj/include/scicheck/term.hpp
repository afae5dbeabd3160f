#pragma once

#include <compare>
#include <string>
#include <string_view>

namespace scicheck {

enum class TermKind { Entity, Predicate };

// NFC, Unicode lowercase, internal whitespace collapsed to one space, trimmed.
// Idempotent. Returns an empty string for blank input.
std::string normalize_text(std::string_view raw);

// Whitespace collapse and trim only (case preserved).
std::string collapse_whitespace(std::string_view raw);

// Unicode lowercase without whitespace handling.
std::string to_lower_utf8(std::string_view raw);

// A canonical graph label. Construction normalizes; an empty result throws
// ValidationError with `location` as the field name.
class Term {
public:
    Term() = default;
    Term(std::string_view raw, TermKind kind, std::string_view location = "term");

    // Wraps text that is already normalized (e.g. read back from a snapshot).
    static Term from_canonical(std::string text, TermKind kind);

    const std::string& text() const noexcept { return text_; }
    TermKind kind() const noexcept { return kind_; }
    bool empty() const noexcept { return text_.empty(); }

    friend bool operator==(const Term& a, const Term& b) { return a.text_ == b.text_; }
    friend std::strong_ordering operator<=>(const Term& a, const Term& b) {
        return a.text_ <=> b.text_;
    }

private:
    std::string text_;
    TermKind kind_ = TermKind::Entity;
};

inline Term entity(std::string_view raw) { return Term(raw, TermKind::Entity, "entity"); }
inline Term predicate(std::string_view raw) { return Term(raw, TermKind::Predicate, "predicate"); }

}  // namespace scicheck
