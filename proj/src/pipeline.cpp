#include "scicheck/pipeline.hpp"

#include "scicheck/ntriples.hpp"

#include <atomic>
#include <map>

namespace scicheck {

using json = nlohmann::json;

std::string_view to_string(ContentKind k) {
    switch (k) {
        case ContentKind::Plain: return "plain";
        case ContentKind::Html: return "html";
        case ContentKind::Vtt: return "vtt";
        case ContentKind::Srt: return "srt";
    }
    return "plain";
}

ContentKind parse_content_kind(std::string_view s) {
    if (s == "plain" || s == "text") return ContentKind::Plain;
    if (s == "html") return ContentKind::Html;
    if (s == "vtt") return ContentKind::Vtt;
    if (s == "srt") return ContentKind::Srt;
    throw ValidationError("kind", "expected plain, html, vtt or srt, got '" + std::string(s) + "'");
}

ContentKind content_kind_for(const std::filesystem::path& path) {
    const std::string ext = to_lower_utf8(path.extension().string());
    if (ext == ".html" || ext == ".htm") return ContentKind::Html;
    if (ext == ".vtt") return ContentKind::Vtt;
    if (ext == ".srt") return ContentKind::Srt;
    return ContentKind::Plain;
}

TextDocument extract_content(const MediaId& media_id, std::string_view content, ContentKind kind) {
    if (!is_valid_utf8(content)) throw UnextractableContent("content is not valid UTF-8");
    TextDocument doc;
    try {
        switch (kind) {
            case ContentKind::Plain: doc = extract_plain(media_id, content); break;
            case ContentKind::Html: doc = extract_html(media_id, content); break;
            case ContentKind::Vtt: doc = parse_transcript(media_id, content, TranscriptFormat::Vtt); break;
            case ContentKind::Srt: doc = parse_transcript(media_id, content, TranscriptFormat::Srt); break;
        }
    } catch (const ParseError& e) {
        throw UnextractableContent(e.what());
    } catch (const ValidationError& e) {
        throw UnextractableContent(e.what());
    }
    if (doc.segments.empty()) throw UnextractableContent("content contains no sentences");
    return doc;
}

GroundTruthFormat parse_ground_truth_format(std::string_view s) {
    if (s == "nt" || s == "ntriples" || s == "n-triples") return GroundTruthFormat::NTriples;
    if (s == "csv") return GroundTruthFormat::Csv;
    throw ValidationError("format", "expected nt or csv, got '" + std::string(s) + "'");
}

GroundTruthBatch parse_ground_truth(std::string_view body, GroundTruthFormat format, const MediaId& source,
                                    const Lexicon& lexicon) {
    if (collapse_whitespace(body).empty()) throw ValidationError("body", "ground truth payload is empty");
    GroundTruthBatch batch;
    std::vector<Triple> raw;
    if (format == GroundTruthFormat::NTriples) {
        raw = parse_ntriples(body);
        for (auto& t : raw)
            if (t.provenance.empty()) t.provenance.insert(source);
    } else {
        auto csv = ingest_csv(body, source);
        raw = std::move(csv.triples);
        batch.duplicates = csv.duplicates;
        batch.rejected_rows = std::move(csv.errors);
    }
    std::map<Triple, std::size_t> seen;
    for (const auto& t : raw) {
        Triple c = align_triple(t, lexicon);
        auto [it, inserted] = seen.emplace(c, batch.triples.size());
        if (inserted) {
            batch.triples.push_back(std::move(c));
        } else {
            ++batch.duplicates;
            batch.triples[it->second].provenance.insert(c.provenance.begin(), c.provenance.end());
        }
    }
    return batch;
}

json to_json(const IngestSummary& s) {
    json rows = json::array();
    for (const auto& r : s.rejected_rows) rows.push_back({{"line", r.line}, {"message", r.message}});
    return {{"added", s.added}, {"merged", s.merged}, {"rejected_rows", std::move(rows)}};
}

IngestSummary apply_ground_truth(GroundTruthGraph& graph, const GroundTruthBatch& batch) {
    IngestSummary s{0, batch.duplicates, batch.rejected_rows};
    for (const auto& t : batch.triples) ++(graph.add(t) == AddOutcome::Added ? s.added : s.merged);
    return s;
}

IngestSummary preview_ground_truth(const GroundTruthGraph& graph, const GroundTruthBatch& batch) {
    IngestSummary s{0, batch.duplicates, batch.rejected_rows};
    for (const auto& t : batch.triples) ++(graph.contains(t) ? s.merged : s.added);
    return s;
}

SentenceExtractor make_extractor(const MediaId& media_id, const PipelineOptions& options) {
    if (options.extractor == ExtractorKind::Rule)
        return [media_id](const Sentence& s) { return extract_rule(media_id, s); };
    if (!options.llm) throw ValidationError("extractor", "LLM extractor selected but no endpoint is configured");
    auto transport = options.transport ? options.transport : std::make_shared<HttpLlmTransport>(*options.llm);
    auto audit = options.audit ? options.audit : std::make_shared<AuditLog>();
    auto llm = std::make_shared<LlmExtractor>(*options.llm, transport, audit);
    const std::size_t runs = options.reproducibility_runs;
    return [media_id, llm, runs](const Sentence& s) {
        if (runs >= 2) return check_reproducibility(media_id, s, *llm, runs);
        return llm->extract(media_id, s);
    };
}

std::vector<AlignedStatement> run_statements(
    const TextDocument& doc, const PipelineOptions& options, const Lexicon& lexicon,
    const std::function<void(const std::function<void(const GroundTruthGraph&)>&)>& with_graph,
    const ProgressFn& progress) {
    const std::size_t total = doc.segments.size();
    auto report = [&](PipelineStage stage, std::size_t done, std::size_t of) {
        if (progress) progress(stage, done, of);
    };
    report(PipelineStage::Extracting, 0, total);

    auto inner = make_extractor(doc.media_id, options);
    std::atomic<std::size_t> done{0};
    SentenceExtractor counted = [&](const Sentence& s) {
        auto out = inner(s);
        report(PipelineStage::Extracting, ++done, total);
        return out;
    };
    auto extraction = extract_document(doc, counted, options.parallelism);
    if (extraction.error) std::rethrow_exception(extraction.error);

    report(PipelineStage::Aligning, 0, extraction.statements.size());
    if (options.proposals_file) append_proposals(*options.proposals_file, lexicon_proposals(extraction.statements, lexicon));
    auto aligned = align(extraction.statements, lexicon);
    report(PipelineStage::Aligning, aligned.size(), aligned.size());

    report(PipelineStage::Checking, 0, aligned.size());
    with_graph([&](const GroundTruthGraph& g) {
        for (auto& st : aligned) st.veracity = check_statement(g, st, options.path_check);
    });
    report(PipelineStage::Checking, aligned.size(), aligned.size());
    return aligned;
}

std::vector<AlignedStatement> run_statements(const TextDocument& doc, const PipelineOptions& options,
                                             const Lexicon& lexicon, const GroundTruthGraph& graph) {
    return run_statements(doc, options, lexicon, [&](const auto& fn) { fn(graph); });
}

}  // namespace scicheck
