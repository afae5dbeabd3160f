#pragma once

#include "scicheck/alignment.hpp"
#include "scicheck/csv.hpp"
#include "scicheck/graph.hpp"
#include "scicheck/scoring.hpp"
#include "scicheck/statements.hpp"
#include "scicheck/text.hpp"
#include "scicheck/veracity.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace scicheck {

enum class ContentKind { Plain, Html, Vtt, Srt };

std::string_view to_string(ContentKind k);
// "plain", "html", "vtt", "srt"; throws ValidationError("kind").
ContentKind parse_content_kind(std::string_view s);
// From a file extension; Plain when unknown.
ContentKind content_kind_for(const std::filesystem::path& path);

// Raised when content cannot be turned into text (bad encoding, malformed
// transcript, no sentences).
class UnextractableContent : public Error {
public:
    using Error::Error;
};

TextDocument extract_content(const MediaId& media_id, std::string_view content, ContentKind kind);

// Ground truth parsed from an upload, already canonicalized.
struct GroundTruthBatch {
    std::vector<Triple> triples;
    std::size_t duplicates = 0;  // rows repeating an earlier row of the same upload
    std::vector<RowError> rejected_rows;
};

enum class GroundTruthFormat { NTriples, Csv };
GroundTruthFormat parse_ground_truth_format(std::string_view s);  // "nt" | "csv"

// Throws ParseError (N-Triples) or ValidationError (CSV header, empty body).
GroundTruthBatch parse_ground_truth(std::string_view body, GroundTruthFormat format, const MediaId& source,
                                    const Lexicon& lexicon);

struct IngestSummary {
    std::size_t added = 0;
    std::size_t merged = 0;
    std::vector<RowError> rejected_rows;
};

nlohmann::json to_json(const IngestSummary& s);

IngestSummary apply_ground_truth(GroundTruthGraph& graph, const GroundTruthBatch& batch);
// What apply_ground_truth would report, without changing the graph.
IngestSummary preview_ground_truth(const GroundTruthGraph& graph, const GroundTruthBatch& batch);

struct PipelineOptions {
    ExtractorKind extractor = ExtractorKind::Rule;
    std::optional<ExtractorConfig> llm;
    std::shared_ptr<LlmTransport> transport;  // defaults to HTTP from `llm`
    std::shared_ptr<AuditLog> audit;
    std::size_t reproducibility_runs = 1;  // >= 2 enables the repeat check
    std::size_t parallelism = 4;
    PathCheckConfig path_check;
    ScoringConfig scoring;
    VeracityPolicy policy = VeracityPolicy::MeanScore;
    std::optional<std::filesystem::path> proposals_file;
};

enum class PipelineStage { Extracting, Aligning, Checking };

using ProgressFn = std::function<void(PipelineStage, std::size_t done, std::size_t total)>;

SentenceExtractor make_extractor(const MediaId& media_id, const PipelineOptions& options);

// Extraction, alignment and veracity check. `check_graph` is called with a
// function to run against a consistent graph view.
std::vector<AlignedStatement> run_statements(
    const TextDocument& doc, const PipelineOptions& options, const Lexicon& lexicon,
    const std::function<void(const std::function<void(const GroundTruthGraph&)>&)>& with_graph,
    const ProgressFn& progress = {});

std::vector<AlignedStatement> run_statements(const TextDocument& doc, const PipelineOptions& options,
                                             const Lexicon& lexicon, const GroundTruthGraph& graph);

}  // namespace scicheck
