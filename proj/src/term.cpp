#include "scicheck/term.hpp"

#include "scicheck/error.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

namespace scicheck {

namespace {

icu::UnicodeString nfc(const icu::UnicodeString& in) {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* norm = icu::Normalizer2::getNFCInstance(status);
    if (U_FAILURE(status)) return in;
    icu::UnicodeString out = norm->normalize(in, status);
    return U_FAILURE(status) ? in : out;
}

icu::UnicodeString collapse(const icu::UnicodeString& in) {
    icu::UnicodeString out;
    bool pending_space = false;
    for (int32_t i = 0; i < in.length();) {
        UChar32 c = in.char32At(i);
        i += U16_LENGTH(c);
        if (u_isUWhiteSpace(c) || c == 0) {
            pending_space = !out.isEmpty();
            continue;
        }
        if (pending_space) {
            out.append(static_cast<UChar>(' '));
            pending_space = false;
        }
        out.append(c);
    }
    return out;
}

std::string utf8(const icu::UnicodeString& s) {
    std::string out;
    s.toUTF8String(out);
    return out;
}

icu::UnicodeString from_utf8(std::string_view raw) {
    return icu::UnicodeString::fromUTF8(icu::StringPiece(raw.data(), static_cast<int32_t>(raw.size())));
}

}  // namespace

std::string normalize_text(std::string_view raw) {
    icu::UnicodeString s = nfc(from_utf8(raw));
    s.toLower(icu::Locale::getRoot());
    // Lowercasing can produce decomposed sequences (e.g. U+0130), so re-compose.
    return utf8(collapse(nfc(s)));
}

std::string collapse_whitespace(std::string_view raw) {
    return utf8(collapse(from_utf8(raw)));
}

std::string to_lower_utf8(std::string_view raw) {
    icu::UnicodeString s = from_utf8(raw);
    s.toLower(icu::Locale::getRoot());
    return utf8(s);
}

Term::Term(std::string_view raw, TermKind kind, std::string_view location)
    : text_(normalize_text(raw)), kind_(kind) {
    if (text_.empty()) {
        throw ValidationError(std::string(location), "empty after normalization");
    }
}

Term Term::from_canonical(std::string text, TermKind kind) {
    Term t;
    t.text_ = std::move(text);
    t.kind_ = kind;
    return t;
}

}  // namespace scicheck
