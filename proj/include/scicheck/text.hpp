#pragma once

#include "scicheck/error.hpp"
#include "scicheck/triple.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace scicheck {

enum class SourceFormat { Plain, Html, TranscriptVtt, TranscriptSrt, External };

std::string_view to_string(SourceFormat f);

struct TimeRange {
    std::int64_t start_ms = 0;
    std::int64_t end_ms = 0;
    friend bool operator==(const TimeRange&, const TimeRange&) = default;
};

struct Sentence {
    std::size_t index = 0;
    std::string text;
    std::optional<TimeRange> time_range;
    friend bool operator==(const Sentence&, const Sentence&) = default;
};

struct TextDocument {
    MediaId media_id;
    std::vector<Sentence> segments;
    SourceFormat source_format = SourceFormat::Plain;
    friend bool operator==(const TextDocument&, const TextDocument&) = default;
};

// Lowercased tokens (with their periods) that never end a sentence.
using AbbreviationList = std::set<std::string>;

// Loads one entry per line; `#` comments and blank lines skipped.
AbbreviationList load_abbreviations(const std::filesystem::path& path);
// data/abbreviations.txt from the install data directory (SCICHECK_DATA overrides).
const AbbreviationList& default_abbreviations();

// Byte span [begin, end) of one sentence in the segmented input.
struct SentenceSpan {
    std::size_t begin = 0;
    std::size_t end = 0;
};

// Splits after `.`, `!` or `?` (runs allowed, closing quotes/brackets
// absorbed) when followed by whitespace or end of input, unless the token
// ending at the period is a listed abbreviation. Spans exclude surrounding
// whitespace; text without a terminator forms a final sentence.
std::vector<SentenceSpan> segment_spans(std::string_view text, const AbbreviationList& abbreviations);
std::vector<std::string> segment_sentences(std::string_view text, const AbbreviationList& abbreviations);

TextDocument extract_plain(const MediaId& media_id, std::string_view text,
                           const AbbreviationList& abbreviations = default_abbreviations());

struct HtmlOptions {
    // Drop sentences of fewer than 3 tokens containing no predicate-lexicon verb.
    bool noise_filter = true;
    const AbbreviationList* abbreviations = nullptr;  // null = defaults
};

// Lenient tag-soup extraction. script/style/nav/header/footer content is
// dropped, block elements break paragraphs, sentences never span paragraphs,
// and no `<` or `>` survives into the output.
TextDocument extract_html(const MediaId& media_id, std::string_view html, const HtmlOptions& options = {});

// Visible text blocks of an HTML document, before segmentation.
std::vector<std::string> html_paragraphs(std::string_view html);

enum class TranscriptFormat { Vtt, Srt };

struct Cue {
    TimeRange range;
    std::string text;
};

// Throws ParseError (unit "cue", 1-based) on a malformed timestamp.
std::vector<Cue> parse_cues(std::string_view input, TranscriptFormat format);

// Cues (ordered by start time) are joined and re-segmented; each sentence
// carries the span from its first cue's start to its last cue's end.
TextDocument parse_transcript(const MediaId& media_id, std::string_view input, TranscriptFormat format,
                              const AbbreviationList& abbreviations = default_abbreviations());

bool is_valid_utf8(std::string_view s);

// Runs third-party converters (PDF text, speech-to-text, ...) whose standard
// output is UTF-8 text. The template must contain `{input}`, which is
// replaced by the shell-quoted input path. At most `max_concurrent`
// subprocesses run at once per extractor.
class ExternalExtractor {
public:
    explicit ExternalExtractor(std::string command_template, std::size_t max_concurrent = 2);
    ~ExternalExtractor();
    ExternalExtractor(const ExternalExtractor&) = delete;
    ExternalExtractor& operator=(const ExternalExtractor&) = delete;

    // Throws ExternalToolError on nonzero exit or non-UTF-8 output.
    TextDocument run(const MediaId& media_id, const std::filesystem::path& input) const;

    const std::string& command_template() const { return template_; }

private:
    struct Gate;
    std::string template_;
    std::unique_ptr<Gate> gate_;
};

class ExternalToolError : public Error {
public:
    ExternalToolError(const std::string& what, std::string stderr_excerpt, int exit_code)
        : Error(what), stderr_(std::move(stderr_excerpt)), exit_code_(exit_code) {}
    const std::string& stderr_excerpt() const { return stderr_; }
    int exit_code() const { return exit_code_; }

private:
    std::string stderr_;
    int exit_code_;
};

TextDocument run_external_extractor(const MediaId& media_id, const std::filesystem::path& input,
                                    const std::string& command_template);

}  // namespace scicheck
