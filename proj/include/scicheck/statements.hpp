#pragma once

#include "scicheck/error.hpp"
#include "scicheck/text.hpp"
#include "scicheck/triple.hpp"
#include "scicheck/verbs.hpp"

#include <nlohmann/json.hpp>

#include <exception>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace scicheck {

enum class ExtractorKind { Llm, Rule };

std::string_view to_string(ExtractorKind k);

// A claim as extracted, before alignment.
struct CandidateStatement {
    MediaId media_id;
    std::size_t sentence_index = 0;
    std::string raw_subject;
    std::string raw_predicate;
    std::string raw_object;
    ExtractorKind extractor = ExtractorKind::Rule;
    bool grounded = false;
    std::optional<bool> reproducible;
    // Optional alignment hints returned by an LLM; only ever proposed to
    // curators, never applied directly.
    std::optional<std::string> proposed_predicate_base;
    std::optional<std::string> proposed_subject_canonical;
    std::optional<std::string> proposed_object_canonical;

    friend bool operator==(const CandidateStatement&, const CandidateStatement&) = default;
};

// Normalized (s, p, o) used to compare statements across runs.
std::string statement_key(const CandidateStatement& c);

// Subject and object must each occur in the sentence (case-insensitive,
// whitespace-normalized substring). The predicate is exempt.
bool check_groundedness(const CandidateStatement& stmt, std::string_view sentence);

// Splits at the first predicate-lexicon verb phrase. An auxiliary followed by
// a verb form is absorbed ("is increasing"). Leading articles are stripped from
// subject and object and trailing punctuation from the object.
std::vector<CandidateStatement> extract_rule(const MediaId& media_id, const Sentence& sentence,
                                             const VerbLexicon& verbs = VerbLexicon::defaults());

struct ExtractorConfig {
    std::string endpoint_url;
    std::string model_name;
    std::string prompt_template;  // must contain {sentence}
    std::string api_key;
    int timeout_ms = 30000;
    int max_retries = 2;
    double temperature = 0.0;

    void validate() const;
    std::string render_prompt(std::string_view sentence) const;
};

// Reads data/prompt_template.txt.
std::string default_prompt_template();
// Keys: endpoint_url, model_name, prompt_template | prompt_template_file,
// timeout_ms, max_retries, temperature. SCICHECK_LLM_ENDPOINT and
// SCICHECK_LLM_API_KEY override the endpoint and key.
ExtractorConfig extractor_config_from_json(const nlohmann::json& j);

// Transport failure after all retries.
class ExtractorTransportError : public Error {
public:
    ExtractorTransportError(std::size_t sentence_index, const std::string& what)
        : Error("sentence " + std::to_string(sentence_index) + ": " + what), sentence_index_(sentence_index) {}
    std::size_t sentence_index() const { return sentence_index_; }

private:
    std::size_t sentence_index_;
};

// The completion could not be read as a JSON array of triples.
class UnparseableResponse : public Error {
public:
    UnparseableResponse(std::size_t sentence_index, std::string raw, const std::string& why)
        : Error("sentence " + std::to_string(sentence_index) + ": unparseable LLM response: " + why),
          sentence_index_(sentence_index), raw_(std::move(raw)) {}
    std::size_t sentence_index() const { return sentence_index_; }
    const std::string& raw_response() const { return raw_; }

private:
    std::size_t sentence_index_;
    std::string raw_;
};

// POSTs {model, prompt, temperature} and returns the response body. Throws
// TransportFailure for connection errors, timeouts and non-2xx statuses.
class LlmTransport {
public:
    struct TransportFailure : std::runtime_error {
        using std::runtime_error::runtime_error;
    };
    virtual ~LlmTransport() = default;
    virtual std::string complete(const nlohmann::json& request) = 0;
};

class HttpLlmTransport : public LlmTransport {
public:
    explicit HttpLlmTransport(ExtractorConfig config);
    std::string complete(const nlohmann::json& request) override;

private:
    ExtractorConfig config_;
};

// JSON-lines audit trail of every extractor call.
class AuditLog {
public:
    struct Record {
        MediaId media_id;
        std::size_t sentence_index = 0;
        std::string prompt_hash;
        std::string raw_response;
        std::string timestamp;
    };

    AuditLog() = default;  // in-memory only
    explicit AuditLog(std::filesystem::path path);

    void append(Record record);
    std::vector<Record> records() const;

private:
    mutable std::mutex mu_;
    std::optional<std::filesystem::path> path_;
    std::vector<Record> records_;
};

nlohmann::json to_json(const AuditLog::Record& r);

std::string sha256_hex(std::string_view data);

// Extracts triples from the array found in a completion body: a bare array,
// or a string field (response / completion / text / content /
// choices[0].message.content / choices[0].text) holding one.
std::vector<CandidateStatement> parse_llm_response(const MediaId& media_id, std::size_t sentence_index,
                                                   std::string_view body);

class LlmExtractor {
public:
    LlmExtractor(ExtractorConfig config, std::shared_ptr<LlmTransport> transport,
                 std::shared_ptr<AuditLog> audit = std::make_shared<AuditLog>());

    // One call (plus retries). Every statement is groundedness-checked.
    std::vector<CandidateStatement> extract(const MediaId& media_id, const Sentence& sentence) const;

    const ExtractorConfig& config() const { return config_; }
    AuditLog& audit() const { return *audit_; }

private:
    ExtractorConfig config_;
    std::shared_ptr<LlmTransport> transport_;
    std::shared_ptr<AuditLog> audit_;
};

// Runs `runs` (>= 2) extractions; each distinct normalized (s, p, o) is
// reported once (first-seen order) with reproducible = present in every run.
// Requires temperature 0.
std::vector<CandidateStatement> check_reproducibility(const MediaId& media_id, const Sentence& sentence,
                                                      const LlmExtractor& extractor, std::size_t runs = 2);

using SentenceExtractor = std::function<std::vector<CandidateStatement>(const Sentence&)>;

struct DocumentExtraction {
    // Statements of sentences [resume_from, next_sentence), in sentence order.
    std::vector<CandidateStatement> statements;
    // First sentence not yet extracted; equals the sentence count when done.
    std::size_t next_sentence = 0;
    // Error raised at `next_sentence`, if any.
    std::exception_ptr error;

    bool complete() const { return !error; }
};

// Per-sentence extraction with bounded parallelism. Output keeps sentence
// order. A failure stops the run at the lowest failing sentence, keeping all
// statements before it, so a later call with resume_from = next_sentence
// continues where this one stopped.
DocumentExtraction extract_document(const TextDocument& doc, const SentenceExtractor& extractor,
                                    std::size_t parallelism = 4, std::size_t resume_from = 0);

}  // namespace scicheck
