#include "scicheck/workspace.hpp"

#include "scicheck/io.hpp"
#include "scicheck/snapshot.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <ctime>

namespace scicheck {

using json = nlohmann::json;

namespace {

std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1,
                  tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms));
    return buf;
}

std::uint64_t numeric_suffix(const std::string& id) {
    const auto dash = id.rfind('-');
    if (dash == std::string::npos) throw ValidationError("id", "malformed id '" + id + "'");
    return std::stoull(id.substr(dash + 1));
}

json triples_json(const std::vector<Triple>& ts) {
    json arr = json::array();
    for (const auto& t : ts) arr.push_back(triple_to_json(t));
    return arr;
}

json content_json(const MediaContent& c) { return {{"kind", to_string(c.kind)}, {"text", c.text}}; }

void refresh_lexicon_flags(AlignedStatement& st, const AlignedTerm& s, const AlignedTerm& p, const AlignedTerm& o) {
    std::erase_if(st.flags, [](const std::string& f) { return f.starts_with("out-of-lexicon:"); });
    if (s.out_of_lexicon) st.flags.insert("out-of-lexicon:subject");
    if (p.out_of_lexicon) st.flags.insert("out-of-lexicon:predicate");
    if (o.out_of_lexicon) st.flags.insert("out-of-lexicon:object");
}

}  // namespace

std::string_view to_string(JobStage s) {
    switch (s) {
        case JobStage::Extracting: return "Extracting";
        case JobStage::Aligning: return "Aligning";
        case JobStage::Checking: return "Checking";
        case JobStage::Done: return "Done";
        case JobStage::Failed: return "Failed";
    }
    return "Failed";
}

json to_json(const JobRecord& j) {
    json out = {{"job_id", j.job_id},
                {"media_id", j.media_id},
                {"stage", to_string(j.stage)},
                {"progress",
                 {{"sentences_total", j.sentences_total},
                  {"sentences_done", j.sentences_done},
                  {"statements", j.statements}}},
                {"error", j.error ? json(*j.error) : json(nullptr)}};
    if (j.stage == JobStage::Done) out["report"] = "/media/" + j.media_id + "/report";
    return out;
}

MediaSubmission submission_from_json(const json& j) {
    if (!j.is_object() || !j.contains("media")) throw ValidationError("media", "request needs a 'media' object");
    MediaSubmission s;
    s.item = media_from_json(j.at("media"));
    if (j.contains("trusted")) {
        if (!j.at("trusted").is_boolean()) throw ValidationError("trusted", "must be a boolean");
        s.trusted = j.at("trusted").get<bool>();
    }
    if (j.contains("extractor")) {
        const std::string e = j.at("extractor").is_string() ? j.at("extractor").get<std::string>() : "";
        if (e != "rule" && e != "llm") throw ValidationError("extractor", "expected rule or llm");
        s.extractor = e == "llm" ? ExtractorKind::Llm : ExtractorKind::Rule;
    }
    if (j.contains("content")) {
        const json& c = j.at("content");
        if (!c.is_object() || !c.contains("text") || !c.at("text").is_string())
            throw ValidationError("content", "expected {\"kind\", \"text\"}");
        s.content.kind = parse_content_kind(c.value("kind", "plain"));
        s.content.text = c.at("text").get<std::string>();
    } else if (s.item.transcript_ref) {
        const std::filesystem::path ref(*s.item.transcript_ref);
        try {
            s.content.text = read_file(ref);
        } catch (const std::exception&) {
            throw UnextractableContent("transcript_ref '" + ref.string() + "' cannot be read");
        }
        s.content.kind = content_kind_for(ref);
    } else {
        throw ValidationError("content", "provide inline content, a file upload or a transcript_ref");
    }
    return s;
}

json to_json(const StoredStatement& s) {
    json j = to_json(s.statement);
    j["id"] = s.id;
    j["media_id"] = s.media_id;
    j["job_id"] = s.job_id;
    j["trusted"] = s.trusted;
    return j;
}

StoredStatement stored_statement_from_json(const json& j) {
    StoredStatement s;
    s.id = j.at("id").get<std::string>();
    s.media_id = j.at("media_id").get<std::string>();
    s.job_id = j.value("job_id", "");
    s.trusted = j.value("trusted", false);
    s.statement = aligned_from_json(j);
    return s;
}

ReviewAction review_action_from_json(const json& j) {
    if (!j.is_object() || !j.contains("action") || !j.at("action").is_string())
        throw ValidationError("action", "expected Approve, Reject or Edit");
    ReviewAction a;
    const std::string action = j.at("action").get<std::string>();
    if (action == "Approve" || action == "Approved") a.action = ReviewStatus::Approved;
    else if (action == "Reject" || action == "Rejected") a.action = ReviewStatus::Rejected;
    else if (action == "Edit" || action == "Edited") a.action = ReviewStatus::Edited;
    else throw ValidationError("action", "expected Approve, Reject or Edit");
    if (j.contains("reviewer") && j.at("reviewer").is_string()) a.reviewer = j.at("reviewer").get<std::string>();
    if (a.action == ReviewStatus::Edited) {
        std::array<std::string, 3> terms;
        const char* names[] = {"subject", "predicate", "object"};
        for (int i = 0; i < 3; ++i) {
            if (!j.contains(names[i]) || !j.at(names[i]).is_string())
                throw ValidationError(names[i], "Edit requires subject, predicate and object");
            terms[i] = j.at(names[i]).get<std::string>();
            if (normalize_text(terms[i]).empty()) throw ValidationError(names[i], "must not be empty");
        }
        a.edit = terms;
    }
    return a;
}

json to_json(const StatementPage& p) {
    json items = json::array();
    for (const auto& s : p.items) items.push_back(to_json(s));
    return {{"items", std::move(items)}, {"page", p.page}, {"page_size", p.page_size}, {"total", p.total}};
}

GraphStats graph_stats(const GroundTruthGraph& g, std::size_t top) {
    GraphStats s;
    s.triples = g.size();
    s.entities = g.entity_count();
    s.predicates = g.predicate_count();
    std::vector<std::pair<std::string, std::size_t>> all;
    all.reserve(g.entity_count());
    for (GroundTruthGraph::NodeId v = 0; v < g.entity_count(); ++v)
        all.emplace_back(g.node_name(v), g.node_degree(v, DegreeMode::Total));
    auto order = [](const auto& a, const auto& b) { return a.second != b.second ? a.second > b.second : a.first < b.first; };
    const std::size_t n = std::min(top, all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n), all.end(), order);
    all.resize(n);
    s.top_degree = std::move(all);
    return s;
}

json to_json(const GraphStats& s) {
    json top = json::array();
    for (const auto& [node, degree] : s.top_degree) top.push_back({{"node", node}, {"degree", degree}});
    return {{"triples", s.triples}, {"entities", s.entities}, {"predicates", s.predicates}, {"top_degree", top}};
}

Workspace::Workspace(ServiceConfig cfg) : Workspace(std::move(cfg), Options{}) {}

Workspace::Workspace(ServiceConfig cfg, Options options) : cfg_(std::move(cfg)), options_(std::move(options)) {
    std::filesystem::create_directories(cfg_.store_dir);
    const auto lock_path = cfg_.store_dir / "LOCK";
    lock_fd_ = ::open(lock_path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (lock_fd_ < 0 || ::flock(lock_fd_, LOCK_EX | LOCK_NB) != 0) {
        if (lock_fd_ >= 0) ::close(lock_fd_);
        throw Error("store " + cfg_.store_dir.string() + " is in use by another process");
    }
    try {
        lexicon_ = std::make_shared<const Lexicon>(cfg_.lexicon ? Lexicon::load(*cfg_.lexicon) : Lexicon::defaults());
        audit_ = std::make_shared<AuditLog>(cfg_.store_dir / "llm_audit.jsonl");
        if (std::filesystem::exists(cfg_.store_dir / "graph" / "META")) {
            auto loaded = read_snapshot(cfg_.store_dir / "graph");
            graph_.write([&](GroundTruthGraph& g) { g = std::move(loaded); });
        }
        graph_journal_ = std::make_unique<Journal>(cfg_.store_dir / "graph.jsonl");
        media_journal_ = std::make_unique<Journal>(cfg_.store_dir / "media.jsonl");
        statement_journal_ = std::make_unique<Journal>(cfg_.store_dir / "statements.jsonl");
        replay();
    } catch (...) {
        ::close(lock_fd_);
        throw;
    }
    if (options_.start_workers)
        for (std::size_t i = 0; i < cfg_.job_workers; ++i) workers_.emplace_back([this] { worker_loop(); });
}

Workspace::~Workspace() {
    {
        std::lock_guard lock(jobs_mu_);
        stopping_ = true;
    }
    jobs_cv_.notify_all();
    for (auto& t : workers_) t.join();
    try {
        if (graph_journal_ && graph_journal_->entries() > 0) snapshot();
    } catch (const std::exception&) {
        // The journal still holds everything; the next open replays it.
    }
    ::close(lock_fd_);
}

void Workspace::replay() {
    graph_journal_->replay([&](const json& e) {
        auto triples = e.at("triples");
        graph_.write([&](GroundTruthGraph& g) {
            for (const auto& t : triples) g.add(triple_from_json(t));
            return 0;
        });
    });

    std::map<std::uint64_t, PendingJob> pending;
    media_journal_->replay([&](const json& e) {
        PendingJob job;
        job.job_id = e.at("job_id").get<std::string>();
        job.submission.item = media_from_json(e.at("item"));
        job.submission.trusted = e.at("trusted").get<bool>();
        job.submission.content.kind = parse_content_kind(e.at("content").at("kind").get<std::string>());
        job.submission.content.text = e.at("content").at("text").get<std::string>();
        if (e.contains("extractor"))
            job.submission.extractor = e.at("extractor") == "llm" ? ExtractorKind::Llm : ExtractorKind::Rule;
        const MediaId id = job.submission.item.id;
        registry_.register_media(job.submission.item);
        trusted_[id] = job.submission.trusted;
        jobs_[job.job_id] = JobRecord{job.job_id, id, JobStage::Extracting, 0, 0, 0, std::nullopt};
        const auto n = numeric_suffix(job.job_id);
        next_job_ = std::max(next_job_, n + 1);
        pending.emplace(n, std::move(job));
    });

    statement_journal_->replay([&](const json& e) {
        replay_statement_entry(e);
        if (e.contains("job_id") && e.at("op") != "review") pending.erase(numeric_suffix(e.at("job_id")));
    });

    for (auto& [n, job] : pending) queue_.push_back(std::move(job));
}

void Workspace::replay_statement_entry(const json& e) {
    const std::string op = e.at("op").get<std::string>();
    if (op == "put") {
        const MediaId media = e.at("media_id").get<std::string>();
        std::erase_if(statements_, [&](const auto& kv) { return kv.second.media_id == media; });
        for (const auto& s : e.at("statements")) {
            auto st = stored_statement_from_json(s);
            const auto n = numeric_suffix(st.id);
            next_statement_ = std::max(next_statement_, n + 1);
            statements_[n] = std::move(st);
        }
        reported_media_.insert(media);
        auto& job = jobs_[e.at("job_id").get<std::string>()];
        job.stage = JobStage::Done;
        job.sentences_done = job.sentences_total = e.value("sentences", std::size_t{0});
        job.statements = e.at("statements").size();
    } else if (op == "failed") {
        auto& job = jobs_[e.at("job_id").get<std::string>()];
        job.stage = JobStage::Failed;
        job.error = e.at("error").get<std::string>();
    } else if (op == "review") {
        auto st = stored_statement_from_json(e.at("statement"));
        statements_[numeric_suffix(st.id)] = st;
        if (e.contains("ingest") && !e.at("ingest").is_null()) {
            const Triple t = triple_from_json(e.at("ingest"));
            graph_.write([&](GroundTruthGraph& g) { return g.add(t); });
        }
    } else {
        throw Error("statements journal: unknown op '" + op + "'");
    }
}

std::shared_ptr<const Lexicon> Workspace::lexicon() const {
    std::lock_guard lock(lexicon_mu_);
    return lexicon_;
}

void Workspace::reload_lexicon() {
    auto fresh = std::make_shared<const Lexicon>(cfg_.lexicon ? Lexicon::load(*cfg_.lexicon) : Lexicon::defaults());
    std::lock_guard lock(lexicon_mu_);
    lexicon_ = std::move(fresh);
}

IngestSummary Workspace::ingest_ground_truth(std::string_view body, GroundTruthFormat format, const MediaId& source,
                                             bool dry_run) {
    const auto batch = parse_ground_truth(body, format, source, *lexicon());
    if (dry_run) return graph_.read([&](const GroundTruthGraph& g) { return preview_ground_truth(g, batch); });
    std::lock_guard lock(ground_truth_mu_);
    if (!batch.triples.empty()) graph_journal_->append({{"op", "add"}, {"triples", triples_json(batch.triples)}});
    auto summary = graph_.write([&](GroundTruthGraph& g) { return apply_ground_truth(g, batch); });
    if (graph_journal_->entries() >= cfg_.snapshot_every) snapshot_locked();
    return summary;
}

void Workspace::snapshot() {
    std::lock_guard lock(ground_truth_mu_);
    snapshot_locked();
}

void Workspace::snapshot_locked() {
    graph_.read([&](const GroundTruthGraph& g) {
        write_snapshot(g, cfg_.store_dir / "graph");
        return 0;
    });
    sync_directory(cfg_.store_dir);
    graph_journal_->reset();
}

std::string Workspace::submit_media(MediaSubmission submission) {
    submission.item.validate();
    if (submission.extractor.value_or(cfg_.extractor) == ExtractorKind::Llm && !cfg_.llm)
        throw ValidationError("extractor", "LLM extractor requested but no endpoint is configured");
    extract_content(submission.item.id, submission.content.text, submission.content.kind);

    std::lock_guard submit(submit_mu_);
    std::string job_id;
    {
        std::lock_guard lock(jobs_mu_);
        job_id = "job-" + std::to_string(next_job_++);
    }
    json entry = {{"op", "submit"},
                  {"job_id", job_id},
                  {"item", submission.item},
                  {"trusted", submission.trusted},
                  {"content", content_json(submission.content)}};
    if (submission.extractor) entry["extractor"] = submission.extractor == ExtractorKind::Llm ? "llm" : "rule";
    media_journal_->append(entry);

    registry_.register_media(submission.item);
    {
        std::unique_lock lock(statements_mu_);
        trusted_[submission.item.id] = submission.trusted;
    }
    {
        std::lock_guard lock(jobs_mu_);
        jobs_[job_id] = JobRecord{job_id, submission.item.id, JobStage::Extracting, 0, 0, 0, std::nullopt};
    }
    enqueue(PendingJob{job_id, std::move(submission)});
    return job_id;
}

void Workspace::enqueue(PendingJob job) {
    {
        std::lock_guard lock(jobs_mu_);
        queue_.push_back(std::move(job));
    }
    jobs_cv_.notify_all();
}

void Workspace::worker_loop() {
    std::unique_lock lock(jobs_mu_);
    for (;;) {
        auto runnable = [&] {
            return std::find_if(queue_.begin(), queue_.end(),
                                [&](const PendingJob& j) { return !active_media_.contains(j.submission.item.id); });
        };
        jobs_cv_.wait(lock, [&] { return stopping_ || runnable() != queue_.end(); });
        if (stopping_) return;
        auto it = runnable();
        PendingJob job = std::move(*it);
        queue_.erase(it);
        active_media_.insert(job.submission.item.id);
        ++running_;
        lock.unlock();
        run_job(job);
        lock.lock();
        active_media_.erase(job.submission.item.id);
        --running_;
        jobs_cv_.notify_all();
    }
}

void Workspace::wait_idle() {
    if (workers_.empty()) {
        for (;;) {
            PendingJob job;
            {
                std::lock_guard lock(jobs_mu_);
                if (queue_.empty()) return;
                job = std::move(queue_.front());
                queue_.pop_front();
            }
            run_job(job);
        }
    }
    std::unique_lock lock(jobs_mu_);
    jobs_cv_.wait(lock, [&] { return queue_.empty() && running_ == 0; });
}

void Workspace::set_stage(const std::string& job_id, JobStage stage, std::size_t done, std::size_t total) {
    std::lock_guard lock(jobs_mu_);
    auto& job = jobs_[job_id];
    if (stage < job.stage) return;
    job.stage = stage;
    if (stage == JobStage::Extracting) {
        job.sentences_done = done;
        job.sentences_total = total;
    }
}

void Workspace::run_job(const PendingJob& job) {
    const MediaId& media_id = job.submission.item.id;
    try {
        const auto doc = extract_content(media_id, job.submission.content.text, job.submission.content.kind);
        auto opts = cfg_.pipeline_options();
        opts.extractor = job.submission.extractor.value_or(cfg_.extractor);
        opts.transport = options_.transport;
        opts.audit = audit_;
        opts.proposals_file = cfg_.store_dir / "lexicon_proposals.jsonl";
        const auto lex = lexicon();
        auto progress = [&](PipelineStage stage, std::size_t done, std::size_t total) {
            const JobStage js = stage == PipelineStage::Extracting ? JobStage::Extracting
                                : stage == PipelineStage::Aligning ? JobStage::Aligning
                                                                   : JobStage::Checking;
            set_stage(job.job_id, js, done, total);
        };
        auto aligned = run_statements(
            doc, opts, *lex,
            [&](const auto& fn) {
                graph_.read([&](const GroundTruthGraph& g) {
                    fn(g);
                    return 0;
                });
            },
            progress);

        std::size_t count = aligned.size();
        {
            std::unique_lock lock(statements_mu_);
            const bool trusted = trusted_[media_id];
            std::vector<StoredStatement> stored;
            json items = json::array();
            for (auto& st : aligned) {
                StoredStatement s{"st-" + std::to_string(next_statement_++), media_id, job.job_id, trusted, std::move(st)};
                items.push_back(to_json(s));
                stored.push_back(std::move(s));
            }
            statement_journal_->append({{"op", "put"},
                                        {"job_id", job.job_id},
                                        {"media_id", media_id},
                                        {"sentences", doc.segments.size()},
                                        {"statements", std::move(items)}});
            std::erase_if(statements_, [&](const auto& kv) { return kv.second.media_id == media_id; });
            for (auto& s : stored) statements_[numeric_suffix(s.id)] = std::move(s);
            reported_media_.insert(media_id);
        }
        std::lock_guard lock(jobs_mu_);
        auto& rec = jobs_[job.job_id];
        rec.stage = JobStage::Done;
        rec.sentences_done = rec.sentences_total = doc.segments.size();
        rec.statements = count;
    } catch (const std::exception& e) {
        try {
            statement_journal_->append({{"op", "failed"}, {"job_id", job.job_id}, {"error", e.what()}});
        } catch (const std::exception&) {
            // The job stays unfinished on disk and is retried after a restart.
        }
        std::lock_guard lock(jobs_mu_);
        auto& rec = jobs_[job.job_id];
        rec.stage = JobStage::Failed;
        rec.error = e.what();
    }
}

std::optional<JobRecord> Workspace::job(const std::string& job_id) const {
    std::lock_guard lock(jobs_mu_);
    auto it = jobs_.find(job_id);
    if (it == jobs_.end()) return std::nullopt;
    return it->second;
}

AccuracyReport Workspace::report(const MediaId& media_id) const {
    if (!registry_.get(media_id)) throw NotFound("unknown media '" + media_id + "'");
    std::shared_lock lock(statements_mu_);
    if (!reported_media_.contains(media_id)) throw NotFound("media '" + media_id + "' has no completed job");
    std::vector<AlignedStatement> list;
    for (const auto& [n, s] : statements_)
        if (s.media_id == media_id) list.push_back(s.statement);
    return build_report(media_id, std::move(list), cfg_.scoring, cfg_.policy);
}

StatementPage Workspace::statements(const StatementQuery& q) const {
    if (q.page < 1) throw ValidationError("page", "must be >= 1");
    if (q.page_size < 1 || q.page_size > 500) throw ValidationError("page_size", "must be in 1..500");
    StatementPage page;
    page.page = q.page;
    page.page_size = q.page_size;
    const std::size_t first = (q.page - 1) * q.page_size;
    std::shared_lock lock(statements_mu_);
    for (const auto& [n, s] : statements_) {
        if (q.media_id && s.media_id != *q.media_id) continue;
        if (q.status && s.statement.review_status != *q.status) continue;
        if (page.total >= first && page.items.size() < q.page_size) page.items.push_back(s);
        ++page.total;
    }
    return page;
}

std::optional<StoredStatement> Workspace::statement(const std::string& id) const {
    std::shared_lock lock(statements_mu_);
    std::uint64_t n = 0;
    try {
        n = numeric_suffix(id);
    } catch (const std::exception&) {
        return std::nullopt;
    }
    auto it = statements_.find(n);
    if (it == statements_.end() || it->second.id != id) return std::nullopt;
    return it->second;
}

StoredStatement Workspace::review(const std::string& id, const ReviewAction& action) {
    std::unique_lock lock(statements_mu_);
    std::uint64_t n = 0;
    try {
        n = numeric_suffix(id);
    } catch (const std::exception&) {
        throw NotFound("unknown statement '" + id + "'");
    }
    auto it = statements_.find(n);
    if (it == statements_.end() || it->second.id != id) throw NotFound("unknown statement '" + id + "'");

    StoredStatement updated = it->second;
    AlignedStatement& st = updated.statement;
    if (!can_transition(st.review_status, action.action))
        throw Conflict("statement " + id + " is " + std::string(to_string(st.review_status)) + " and cannot become " +
                       std::string(to_string(action.action)));
    if (action.action == ReviewStatus::Edited) {
        if (!action.edit) throw ValidationError("edit", "Edit requires subject, predicate and object");
        const auto lex = lexicon();
        const auto& [s_raw, p_raw, o_raw] = *action.edit;
        for (const auto& [name, raw] : {std::pair{"subject", s_raw}, {"predicate", p_raw}, {"object", o_raw}})
            if (normalize_text(raw).empty()) throw ValidationError(name, "must not be empty");
        const auto s = canonicalize_entity(s_raw, *lex);
        const auto p = normalize_predicate(p_raw, *lex);
        const auto o = canonicalize_entity(o_raw, *lex);
        st.triple = Triple(s.term, p.term, o.term, st.triple.provenance);
        refresh_lexicon_flags(st, s, p, o);
        st.veracity = graph_.read([&](const GroundTruthGraph& g) { return check_statement(g, st, cfg_.path_check); });
    }
    st.review_status = action.action;

    std::optional<Triple> ingest;
    if (action.action == ReviewStatus::Approved && updated.trusted) ingest = st.triple;
    statement_journal_->append({{"op", "review"},
                                {"id", id},
                                {"action", to_string(action.action)},
                                {"reviewer", action.reviewer},
                                {"timestamp", utc_now()},
                                {"statement", to_json(updated)},
                                {"ingest", ingest ? triple_to_json(*ingest) : json(nullptr)}});
    it->second = updated;
    if (ingest) graph_.write([&](GroundTruthGraph& g) { return g.add(*ingest); });
    return updated;
}

std::vector<MediaItem> Workspace::search(const MediaFilter& filter) const { return registry_.filter(filter); }

std::optional<MediaItem> Workspace::media(const MediaId& id) const { return registry_.get(id); }

GraphStats Workspace::stats() const {
    return graph_.read([](const GroundTruthGraph& g) { return graph_stats(g); });
}

}  // namespace scicheck
