#include "scicheck/text.hpp"

#include "scicheck/term.hpp"
#include "scicheck/verbs.hpp"

#include <cctype>
#include <cstdint>
#include <optional>
#include <set>

namespace scicheck {

namespace {

const std::set<std::string, std::less<>> kDropped = {"script", "style", "nav", "header", "footer", "head",
                                                     "noscript", "template", "svg"};
const std::set<std::string, std::less<>> kRawText = {"script", "style"};
const std::set<std::string, std::less<>> kBlock = {
    "p",      "div",     "br",         "li",      "ul",    "ol",    "h1",      "h2",     "h3",
    "h4",     "h5",      "h6",         "section", "article", "main", "aside",  "table",  "tr",
    "td",     "th",      "blockquote", "pre",     "figure", "figcaption", "dl", "dt",     "dd",
    "hr",     "title",   "body",       "html",    "head",  "form",  "address", "details", "summary"};

void append_codepoint(std::string& out, std::uint32_t cp) {
    // Markup characters never reach the output.
    if (cp == '<' || cp == '>') {
        out += ' ';
        return;
    }
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp <= 0x10FFFF) {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

// Decodes the entity starting at html[i] == '&'; returns characters consumed
// (0 if not an entity).
std::size_t decode_entity(std::string_view html, std::size_t i, std::string& out) {
    const std::size_t semi = html.find(';', i);
    if (semi == std::string_view::npos || semi - i > 10) return 0;
    std::string_view name = html.substr(i + 1, semi - i - 1);
    if (name.empty()) return 0;
    std::uint32_t cp = 0;
    if (name[0] == '#') {
        const bool hex = name.size() > 1 && (name[1] == 'x' || name[1] == 'X');
        std::string_view digits = name.substr(hex ? 2 : 1);
        if (digits.empty()) return 0;
        for (char c : digits) {
            const int v = std::isdigit(static_cast<unsigned char>(c)) ? c - '0'
                          : hex && std::isxdigit(static_cast<unsigned char>(c))
                              ? (std::tolower(static_cast<unsigned char>(c)) - 'a' + 10)
                              : -1;
            if (v < 0) return 0;
            cp = cp * (hex ? 16 : 10) + static_cast<std::uint32_t>(v);
            if (cp > 0x10FFFF) return 0;
        }
    } else if (name == "amp") {
        cp = '&';
    } else if (name == "lt") {
        cp = '<';
    } else if (name == "gt") {
        cp = '>';
    } else if (name == "quot") {
        cp = '"';
    } else if (name == "apos") {
        cp = '\'';
    } else if (name == "nbsp") {
        cp = ' ';
    } else if (name == "ndash") {
        cp = 0x2013;
    } else if (name == "mdash") {
        cp = 0x2014;
    } else if (name == "rsquo") {
        cp = 0x2019;
    } else if (name == "lsquo") {
        cp = 0x2018;
    } else if (name == "ldquo") {
        cp = 0x201C;
    } else if (name == "rdquo") {
        cp = 0x201D;
    } else {
        return 0;
    }
    append_codepoint(out, cp);
    return semi - i + 1;
}

struct Tag {
    std::string name;
    bool closing = false;
    bool self_closing = false;
    std::size_t end = 0;  // index just past '>'
};

// Parses a tag at html[i] == '<'. Returns nullopt when '<' does not start a tag.
std::optional<Tag> parse_tag(std::string_view html, std::size_t i) {
    Tag tag;
    std::size_t j = i + 1;
    if (j < html.size() && html[j] == '/') {
        tag.closing = true;
        ++j;
    }
    if (j >= html.size() || !std::isalpha(static_cast<unsigned char>(html[j]))) return std::nullopt;
    while (j < html.size() && (std::isalnum(static_cast<unsigned char>(html[j])) || html[j] == '-')) {
        tag.name += static_cast<char>(std::tolower(static_cast<unsigned char>(html[j])));
        ++j;
    }
    char quote = 0;
    while (j < html.size()) {
        const char c = html[j];
        if (quote) {
            if (c == quote) quote = 0;
        } else if (c == '"' || c == '\'') {
            quote = c;
        } else if (c == '>') {
            tag.self_closing = j > 0 && html[j - 1] == '/';
            tag.end = j + 1;
            return tag;
        }
        ++j;
    }
    tag.end = html.size();  // unterminated tag swallows the rest (lenient)
    return tag;
}

}  // namespace

std::vector<std::string> html_paragraphs(std::string_view html) {
    std::vector<std::string> paragraphs;
    std::string current;
    int dropped_depth = 0;
    auto flush = [&] {
        std::string p = collapse_whitespace(current);
        if (!p.empty()) paragraphs.push_back(std::move(p));
        current.clear();
    };

    std::size_t i = 0;
    while (i < html.size()) {
        const char c = html[i];
        if (c == '<') {
            if (html.compare(i, 4, "<!--") == 0) {
                const std::size_t end = html.find("-->", i + 4);
                i = end == std::string_view::npos ? html.size() : end + 3;
                continue;
            }
            if (i + 1 < html.size() && (html[i + 1] == '!' || html[i + 1] == '?')) {
                const std::size_t end = html.find('>', i);
                i = end == std::string_view::npos ? html.size() : end + 1;
                continue;
            }
            std::optional<Tag> tag = parse_tag(html, i);
            if (!tag) {
                current += ' ';
                ++i;
                continue;
            }
            i = tag->end;
            if (kRawText.contains(tag->name) && !tag->closing && !tag->self_closing) {
                const std::string close = "</" + tag->name;
                std::size_t k = i;
                while (k < html.size()) {
                    k = html.find("</", k);
                    if (k == std::string_view::npos) break;
                    std::string probe;
                    for (std::size_t m = k; m < html.size() && m < k + close.size(); ++m) {
                        probe += static_cast<char>(std::tolower(static_cast<unsigned char>(html[m])));
                    }
                    if (probe == close) break;
                    k += 2;
                }
                if (k == std::string_view::npos || k >= html.size()) {
                    i = html.size();
                } else {
                    const std::size_t gt = html.find('>', k);
                    i = gt == std::string_view::npos ? html.size() : gt + 1;
                }
                continue;
            }
            if (kDropped.contains(tag->name) && !tag->self_closing) {
                if (tag->closing) {
                    if (dropped_depth > 0) --dropped_depth;
                } else {
                    ++dropped_depth;
                }
                flush();
                continue;
            }
            if (kBlock.contains(tag->name) && dropped_depth == 0) flush();
            continue;
        }
        if (dropped_depth > 0) {
            ++i;
            continue;
        }
        if (c == '&') {
            const std::size_t n = decode_entity(html, i, current);
            if (n > 0) {
                i += n;
                continue;
            }
        }
        current += c == '>' ? ' ' : c;
        ++i;
    }
    flush();
    return paragraphs;
}

TextDocument extract_html(const MediaId& media_id, std::string_view html, const HtmlOptions& options) {
    const AbbreviationList& abbreviations = options.abbreviations ? *options.abbreviations : default_abbreviations();
    const VerbLexicon& verbs = VerbLexicon::defaults();
    TextDocument doc{media_id, {}, SourceFormat::Html};
    for (const std::string& paragraph : html_paragraphs(html)) {
        for (std::string& s : segment_sentences(paragraph, abbreviations)) {
            if (s.empty()) continue;
            if (options.noise_filter) {
                std::vector<std::string> keys;
                for (const std::string& t : split_tokens(s)) keys.push_back(token_key(t));
                if (keys.size() < 3 && !verbs.has_verb(keys)) continue;
            }
            doc.segments.push_back({doc.segments.size(), std::move(s), std::nullopt});
        }
    }
    return doc;
}

}  // namespace scicheck
