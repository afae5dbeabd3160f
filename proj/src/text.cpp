#include "scicheck/text.hpp"

#include "scicheck/io.hpp"
#include "scicheck/term.hpp"
#include "scicheck/verbs.hpp"

#include <sstream>

namespace scicheck {

std::string_view to_string(SourceFormat f) {
    switch (f) {
        case SourceFormat::Plain: return "Plain";
        case SourceFormat::Html: return "Html";
        case SourceFormat::TranscriptVtt: return "TranscriptVtt";
        case SourceFormat::TranscriptSrt: return "TranscriptSrt";
        case SourceFormat::External: return "External";
    }
    return "Plain";
}

AbbreviationList load_abbreviations(const std::filesystem::path& path) {
    AbbreviationList out;
    std::istringstream in(read_file(path));
    std::string line;
    while (std::getline(in, line)) {
        std::string t = collapse_whitespace(line);
        if (t.empty() || t.front() == '#') continue;
        out.insert(to_lower_utf8(t));
    }
    return out;
}

const AbbreviationList& default_abbreviations() {
    static const AbbreviationList list = load_abbreviations(data_dir() / "abbreviations.txt");
    return list;
}

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }
bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }
bool is_closer(char c) { return c == '"' || c == '\'' || c == ')' || c == ']'; }

}  // namespace

std::vector<SentenceSpan> segment_spans(std::string_view text, const AbbreviationList& abbreviations) {
    std::vector<SentenceSpan> out;
    std::size_t start = 0;
    auto emit = [&](std::size_t end) {
        std::size_t b = start;
        while (b < end && is_space(text[b])) ++b;
        std::size_t e = end;
        while (e > b && is_space(text[e - 1])) --e;
        if (e > b) out.push_back({b, e});
    };

    std::size_t i = 0;
    while (i < text.size()) {
        if (!is_terminator(text[i])) {
            ++i;
            continue;
        }
        const std::size_t first_term = i;
        std::size_t j = i;
        while (j < text.size() && is_terminator(text[j])) ++j;
        while (j < text.size() && is_closer(text[j])) ++j;
        if (j < text.size() && !is_space(text[j])) {
            i = j;
            continue;
        }
        // A lone period may belong to an abbreviation such as "e.g." or "Dr.".
        if (text[first_term] == '.' && j == first_term + 1) {
            std::size_t w = first_term;
            while (w > start && !is_space(text[w - 1])) --w;
            std::string word = to_lower_utf8(text.substr(w, first_term + 1 - w));
            while (!word.empty() && (word.front() == '(' || word.front() == '"' || word.front() == '\'')) {
                word.erase(word.begin());
            }
            if (abbreviations.contains(word)) {
                i = j;
                continue;
            }
        }
        emit(j);
        start = j;
        i = j;
    }
    emit(text.size());
    return out;
}

std::vector<std::string> segment_sentences(std::string_view text, const AbbreviationList& abbreviations) {
    std::vector<std::string> out;
    for (const SentenceSpan& s : segment_spans(text, abbreviations)) {
        out.push_back(collapse_whitespace(text.substr(s.begin, s.end - s.begin)));
    }
    return out;
}

TextDocument extract_plain(const MediaId& media_id, std::string_view text, const AbbreviationList& abbreviations) {
    TextDocument doc{media_id, {}, SourceFormat::Plain};
    for (std::string& s : segment_sentences(text, abbreviations)) {
        if (s.empty()) continue;
        doc.segments.push_back({doc.segments.size(), std::move(s), std::nullopt});
    }
    return doc;
}

bool is_valid_utf8(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size()) {
        const auto c = static_cast<unsigned char>(s[i]);
        std::size_t len;
        std::uint32_t cp;
        if (c < 0x80) {
            ++i;
            continue;
        } else if ((c & 0xE0) == 0xC0) {
            len = 2;
            cp = c & 0x1F;
        } else if ((c & 0xF0) == 0xE0) {
            len = 3;
            cp = c & 0x0F;
        } else if ((c & 0xF8) == 0xF0) {
            len = 4;
            cp = c & 0x07;
        } else {
            return false;
        }
        if (i + len > s.size()) return false;
        for (std::size_t k = 1; k < len; ++k) {
            const auto cc = static_cast<unsigned char>(s[i + k]);
            if ((cc & 0xC0) != 0x80) return false;
            cp = (cp << 6) | (cc & 0x3F);
        }
        if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) || cp > 0x10FFFF ||
            (cp >= 0xD800 && cp <= 0xDFFF)) {
            return false;
        }
        i += len;
    }
    return true;
}

}  // namespace scicheck
