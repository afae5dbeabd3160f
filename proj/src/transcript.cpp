#include "scicheck/text.hpp"

#include "scicheck/error.hpp"
#include "scicheck/term.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace scicheck {

namespace {

std::vector<std::string> lines_of(std::string_view input) {
    std::vector<std::string> lines;
    std::string line;
    std::istringstream in{std::string(input)};
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    if (!lines.empty() && lines.front().rfind("\xEF\xBB\xBF", 0) == 0) lines.front().erase(0, 3);
    return lines;
}

bool blank(const std::string& s) { return s.find_first_not_of(" \t") == std::string::npos; }

// HH:MM:SS,mmm (SRT) or [HH:]MM:SS.mmm (VTT); returns milliseconds or -1.
std::int64_t parse_timestamp(std::string_view t, TranscriptFormat format) {
    const char frac_sep = format == TranscriptFormat::Srt ? ',' : '.';
    const std::size_t sep = t.rfind(frac_sep);
    if (sep == std::string_view::npos || t.size() - sep != 4) return -1;
    std::vector<std::int64_t> parts;
    std::size_t start = 0;
    std::string_view clock = t.substr(0, sep);
    while (true) {
        const std::size_t colon = clock.find(':', start);
        std::string_view field = clock.substr(start, colon == std::string_view::npos ? std::string_view::npos : colon - start);
        if (field.empty() || field.size() > 3) return -1;
        std::int64_t v = 0;
        for (char c : field) {
            if (!std::isdigit(static_cast<unsigned char>(c))) return -1;
            v = v * 10 + (c - '0');
        }
        parts.push_back(v);
        if (colon == std::string_view::npos) break;
        start = colon + 1;
    }
    const bool hours_optional = format == TranscriptFormat::Vtt;
    if (parts.size() != 3 && !(hours_optional && parts.size() == 2)) return -1;
    if (parts.size() == 2) parts.insert(parts.begin(), 0);
    if (parts[1] > 59 || parts[2] > 59) return -1;
    std::int64_t ms = 0;
    for (char c : t.substr(sep + 1)) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return -1;
        ms = ms * 10 + (c - '0');
    }
    return ((parts[0] * 60 + parts[1]) * 60 + parts[2]) * 1000 + ms;
}

bool looks_like_timing(const std::string& line) { return line.find("-->") != std::string::npos; }

TimeRange parse_timing(const std::string& line, TranscriptFormat format, std::size_t cue_no) {
    const std::size_t arrow = line.find("-->");
    std::string left = collapse_whitespace(line.substr(0, arrow));
    std::string right = collapse_whitespace(line.substr(arrow + 3));
    right = right.substr(0, right.find(' '));  // VTT cue settings follow the end time
    const std::int64_t start = parse_timestamp(left, format);
    const std::int64_t end = parse_timestamp(right, format);
    if (start < 0) throw ParseError(cue_no, "malformed start timestamp '" + left + "'", "cue");
    if (end < 0) throw ParseError(cue_no, "malformed end timestamp '" + right + "'", "cue");
    if (end < start) throw ParseError(cue_no, "end timestamp precedes start", "cue");
    return {start, end};
}

// Drops VTT voice/class tags such as <v Speaker> or <i>.
std::string strip_cue_tags(const std::string& text) {
    std::string out;
    bool in_tag = false;
    for (char c : text) {
        if (c == '<') {
            in_tag = true;
            out += ' ';
        } else if (c == '>' && in_tag) {
            in_tag = false;
        } else if (!in_tag) {
            out += c;
        }
    }
    return out;
}

}  // namespace

std::vector<Cue> parse_cues(std::string_view input, TranscriptFormat format) {
    const std::vector<std::string> lines = lines_of(input);
    std::vector<Cue> cues;
    std::size_t i = 0;

    if (format == TranscriptFormat::Vtt) {
        while (i < lines.size() && blank(lines[i])) ++i;
        if (i >= lines.size() || lines[i].rfind("WEBVTT", 0) != 0) {
            throw ParseError(1, "missing WEBVTT header", "line");
        }
        while (i < lines.size() && !blank(lines[i])) ++i;  // header block
    }

    while (i < lines.size()) {
        while (i < lines.size() && blank(lines[i])) ++i;
        if (i >= lines.size()) break;
        std::vector<std::string> block;
        while (i < lines.size() && !blank(lines[i])) block.push_back(lines[i++]);

        if (format == TranscriptFormat::Vtt &&
            (block[0].rfind("NOTE", 0) == 0 || block[0].rfind("STYLE", 0) == 0 || block[0].rfind("REGION", 0) == 0)) {
            continue;
        }
        const std::size_t cue_no = cues.size() + 1;
        std::size_t timing = 0;
        if (!looks_like_timing(block[0])) {
            timing = 1;  // cue number (SRT) or identifier (VTT)
            if (block.size() < 2 || !looks_like_timing(block[1])) {
                throw ParseError(cue_no, "missing timing line", "cue");
            }
        }
        Cue cue;
        cue.range = parse_timing(block[timing], format, cue_no);
        for (std::size_t k = timing + 1; k < block.size(); ++k) {
            if (!cue.text.empty()) cue.text += ' ';
            cue.text += format == TranscriptFormat::Vtt ? strip_cue_tags(block[k]) : block[k];
        }
        cue.text = collapse_whitespace(cue.text);
        cues.push_back(std::move(cue));
    }
    std::stable_sort(cues.begin(), cues.end(),
                     [](const Cue& a, const Cue& b) { return a.range.start_ms < b.range.start_ms; });
    return cues;
}

TextDocument parse_transcript(const MediaId& media_id, std::string_view input, TranscriptFormat format,
                              const AbbreviationList& abbreviations) {
    const std::vector<Cue> cues = parse_cues(input, format);
    TextDocument doc{media_id, {},
                     format == TranscriptFormat::Vtt ? SourceFormat::TranscriptVtt : SourceFormat::TranscriptSrt};

    std::string joined;
    std::vector<std::size_t> cue_begin;  // byte offset where each cue's text starts
    for (const Cue& cue : cues) {
        if (!joined.empty()) joined += ' ';
        cue_begin.push_back(joined.size());
        joined += cue.text;
    }
    auto cue_at = [&](std::size_t offset) {
        auto it = std::upper_bound(cue_begin.begin(), cue_begin.end(), offset);
        return static_cast<std::size_t>(it - cue_begin.begin()) - 1;
    };

    for (const SentenceSpan& span : segment_spans(joined, abbreviations)) {
        std::string text = collapse_whitespace(std::string_view(joined).substr(span.begin, span.end - span.begin));
        if (text.empty()) continue;
        const std::size_t first = cue_at(span.begin);
        const std::size_t last = cue_at(span.end - 1);
        TimeRange range{cues[first].range.start_ms, cues[first].range.end_ms};
        for (std::size_t c = first; c <= last; ++c) {
            range.start_ms = std::min(range.start_ms, cues[c].range.start_ms);
            range.end_ms = std::max(range.end_ms, cues[c].range.end_ms);
        }
        doc.segments.push_back({doc.segments.size(), std::move(text), range});
    }
    return doc;
}

}  // namespace scicheck
