#pragma once

#include "scicheck/config.hpp"
#include "scicheck/graph.hpp"
#include "scicheck/journal.hpp"
#include "scicheck/media.hpp"
#include "scicheck/pipeline.hpp"
#include "scicheck/scoring.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <thread>
#include <vector>

namespace scicheck {

class NotFound : public Error {
public:
    using Error::Error;
};

// An operation that is valid in general but not in the current state.
class Conflict : public Error {
public:
    using Error::Error;
};

// The ground-truth graph behind a reader/writer lock.
class SharedGraph {
public:
    template <typename Fn>
    auto read(Fn&& fn) const {
        std::shared_lock lock(mu_);
        return fn(static_cast<const GroundTruthGraph&>(graph_));
    }
    template <typename Fn>
    auto write(Fn&& fn) {
        std::unique_lock lock(mu_);
        return fn(graph_);
    }

private:
    mutable std::shared_mutex mu_;
    GroundTruthGraph graph_;
};

enum class JobStage { Extracting, Aligning, Checking, Done, Failed };

std::string_view to_string(JobStage s);

struct JobRecord {
    std::string job_id;
    MediaId media_id;
    JobStage stage = JobStage::Extracting;
    std::size_t sentences_total = 0;
    std::size_t sentences_done = 0;
    std::size_t statements = 0;
    std::optional<std::string> error;
};

nlohmann::json to_json(const JobRecord& j);

struct MediaContent {
    ContentKind kind = ContentKind::Plain;
    std::string text;
};

struct MediaSubmission {
    MediaItem item;
    bool trusted = false;
    MediaContent content;
    std::optional<ExtractorKind> extractor;  // config default when empty
};

// Parses {"media": {...}, "trusted": bool, "content": {"kind", "text"}, "extractor"}.
MediaSubmission submission_from_json(const nlohmann::json& j);

struct StoredStatement {
    std::string id;  // "st-<n>"
    MediaId media_id;
    std::string job_id;
    bool trusted = false;
    AlignedStatement statement;
};

// The statement fields plus id, media_id, job_id and trusted.
nlohmann::json to_json(const StoredStatement& s);
StoredStatement stored_statement_from_json(const nlohmann::json& j);

struct ReviewAction {
    ReviewStatus action = ReviewStatus::Approved;  // Approved, Rejected or Edited
    std::string reviewer;
    std::optional<std::array<std::string, 3>> edit;  // required for Edited
};

// {"action": "Approve" | "Reject" | "Edit", "reviewer", "subject", "predicate", "object"}
ReviewAction review_action_from_json(const nlohmann::json& j);

struct StatementQuery {
    std::optional<MediaId> media_id;
    std::optional<ReviewStatus> status;
    std::size_t page = 1;
    std::size_t page_size = 50;
};

struct StatementPage {
    std::vector<StoredStatement> items;
    std::size_t page = 1;
    std::size_t page_size = 0;
    std::size_t total = 0;
};

nlohmann::json to_json(const StatementPage& p);

struct GraphStats {
    std::size_t triples = 0;
    std::size_t entities = 0;
    std::size_t predicates = 0;
    std::vector<std::pair<std::string, std::size_t>> top_degree;
};

GraphStats graph_stats(const GroundTruthGraph& g, std::size_t top = 10);
nlohmann::json to_json(const GraphStats& s);

// A persistent store: ground-truth graph, media registry, statements and
// jobs, each backed by a journal under store_dir and replayed on open. Every
// mutating call returns only after its journal entry is on disk.
class Workspace {
public:
    struct Options {
        bool start_workers = true;
        std::shared_ptr<LlmTransport> transport;  // test hook for the LLM extractor
    };

    explicit Workspace(ServiceConfig cfg);
    Workspace(ServiceConfig cfg, Options options);
    ~Workspace();
    Workspace(const Workspace&) = delete;
    Workspace& operator=(const Workspace&) = delete;

    IngestSummary ingest_ground_truth(std::string_view body, GroundTruthFormat format, const MediaId& source,
                                      bool dry_run = false);

    // Registers the media and queues a pipeline job. Text extraction runs
    // before returning, so unusable content raises UnextractableContent and
    // nothing is stored.
    std::string submit_media(MediaSubmission submission);

    std::optional<JobRecord> job(const std::string& job_id) const;
    // NotFound for unknown media or media without a completed job.
    AccuracyReport report(const MediaId& media_id) const;
    StatementPage statements(const StatementQuery& query) const;
    std::optional<StoredStatement> statement(const std::string& id) const;
    // NotFound, Conflict (illegal transition) or ValidationError (bad edit).
    StoredStatement review(const std::string& id, const ReviewAction& action);

    std::vector<MediaItem> search(const MediaFilter& filter) const;
    std::optional<MediaItem> media(const MediaId& id) const;
    GraphStats stats() const;

    const SharedGraph& graph() const { return graph_; }
    const ServiceConfig& config() const { return cfg_; }
    std::shared_ptr<const Lexicon> lexicon() const;
    void reload_lexicon();

    // Blocks until no job is queued or running.
    void wait_idle();
    // Writes a graph snapshot and empties the ground-truth journal.
    void snapshot();

private:
    struct PendingJob {
        std::string job_id;
        MediaSubmission submission;
    };

    void replay();
    void replay_statement_entry(const nlohmann::json& e);
    void enqueue(PendingJob job);
    void worker_loop();
    void run_job(const PendingJob& job);
    void set_stage(const std::string& job_id, JobStage stage, std::size_t done, std::size_t total);
    void snapshot_locked();

    ServiceConfig cfg_;
    Options options_;
    int lock_fd_ = -1;

    SharedGraph graph_;
    MediaRegistry registry_;

    mutable std::mutex lexicon_mu_;
    std::shared_ptr<const Lexicon> lexicon_;

    std::mutex ground_truth_mu_;  // serializes journal + graph writes + snapshots
    std::mutex submit_mu_;
    std::unique_ptr<Journal> graph_journal_;
    std::unique_ptr<Journal> media_journal_;
    std::unique_ptr<Journal> statement_journal_;
    std::shared_ptr<AuditLog> audit_;

    mutable std::shared_mutex statements_mu_;
    std::map<std::uint64_t, StoredStatement> statements_;
    std::set<MediaId> reported_media_;
    std::map<MediaId, bool> trusted_;
    std::uint64_t next_statement_ = 1;

    mutable std::mutex jobs_mu_;
    std::condition_variable jobs_cv_;
    std::map<std::string, JobRecord> jobs_;
    std::deque<PendingJob> queue_;
    std::set<MediaId> active_media_;
    std::size_t running_ = 0;
    std::uint64_t next_job_ = 1;
    bool stopping_ = false;
    std::vector<std::thread> workers_;
};

}  // namespace scicheck
