#include "scicheck/service.hpp"

#include <httplib.h>

#include <csignal>
#include <cstdio>
#include <set>

namespace scicheck {

using json = nlohmann::json;

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message, json extra = json::object()) {
    extra["error"] = message;
    send_json(res, status, extra);
}

// Maps domain errors to HTTP statuses.
template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
    return [fn](const httplib::Request& req, httplib::Response& res) {
        try {
            fn(req, res);
        } catch (const NotFound& e) {
            send_error(res, 404, e.what());
        } catch (const Conflict& e) {
            send_error(res, 409, e.what());
        } catch (const UnextractableContent& e) {
            send_error(res, 422, e.what());
        } catch (const ParseError& e) {
            send_error(res, 400, e.what(), {{"line", e.line()}});
        } catch (const ValidationError& e) {
            send_error(res, 400, e.what(), {{"field", e.field()}});
        } catch (const Error& e) {
            send_error(res, 400, e.what());
        } catch (const json::exception& e) {
            send_error(res, 400, std::string("malformed JSON: ") + e.what());
        } catch (const std::exception& e) {
            send_error(res, 500, e.what());
        }
    };
}

std::size_t size_param(const httplib::Request& req, const char* name, std::size_t fallback) {
    if (!req.has_param(name)) return fallback;
    const std::string v = req.get_param_value(name);
    try {
        std::size_t used = 0;
        const long long n = std::stoll(v, &used);
        if (used != v.size() || n < 0) throw std::invalid_argument(name);
        return static_cast<std::size_t>(n);
    } catch (const std::exception&) {
        throw ValidationError(name, "expected a non-negative integer");
    }
}

std::int64_t int_value(const std::string& name, const std::string& v) {
    try {
        std::size_t used = 0;
        const long long n = std::stoll(v, &used);
        if (used != v.size()) throw std::invalid_argument(name);
        return n;
    } catch (const std::exception&) {
        throw ValidationError(name, "expected an integer");
    }
}

bool truthy(const std::string& v) { return v == "1" || v == "true" || v == "yes"; }

MediaSubmission multipart_submission(const httplib::Request& req) {
    if (!req.has_file("metadata")) throw ValidationError("metadata", "multipart upload needs a 'metadata' part");
    json meta = json::parse(req.get_file_value("metadata").content);
    if (!meta.contains("media")) meta = json{{"media", meta}};
    if (req.has_file("file")) {
        const auto& file = req.get_file_value("file");
        const std::string kind = req.has_file("kind") ? req.get_file_value("kind").content
                                                       : std::string(to_string(content_kind_for(file.filename)));
        meta["content"] = {{"kind", kind}, {"text", file.content}};
    }
    if (req.has_file("trusted")) meta["trusted"] = truthy(req.get_file_value("trusted").content);
    return submission_from_json(meta);
}

httplib::Server* g_server = nullptr;

void on_signal(int) {
    if (g_server) g_server->stop();
}

}  // namespace

MediaFilter media_filter_from_params(const std::multimap<std::string, std::string>& params) {
    MediaFilter f;
    for (const auto& [name, value] : params) {
        if (name == "title_contains") f.title_contains = value;
        else if (name == "topic") f.topic = value;
        else if (name == "publisher") f.publisher = value;
        else if (name == "published_after") f.published_after = Date::parse(value, name);
        else if (name == "published_before") f.published_before = Date::parse(value, name);
        else if (name == "min_duration_seconds") f.min_duration_seconds = int_value(name, value);
        else if (name == "max_duration_seconds") f.max_duration_seconds = int_value(name, value);
        else if (name == "language") f.language = value;
        else if (name == "media_kind") f.media_kind = parse_media_kind(value);
        else throw ValidationError(name, "unknown search parameter");
    }
    f.validate();
    return f;
}

json search_response(const std::vector<MediaItem>& items) {
    json arr = json::array();
    for (const auto& m : items) arr.push_back(m);
    return {{"items", std::move(arr)}, {"total", items.size()}};
}

void mount_api(httplib::Server& server, Workspace& ws) {
    const std::optional<std::string> token = ws.config().api_token;
    auto authorized = [token](const httplib::Request& req, httplib::Response& res) {
        if (!token || req.get_header_value("Authorization") == "Bearer " + *token) return true;
        send_error(res, 401, "missing or invalid API token");
        return false;
    };

    server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) { send_json(res, 200, {{"ok", true}}); });

    server.Post("/ground-truth", guarded([&ws, authorized](const httplib::Request& req, httplib::Response& res) {
        if (!authorized(req, res)) return;
        std::string format = req.get_param_value("format");
        if (format.empty()) {
            const std::string type = req.get_header_value("Content-Type");
            if (type.starts_with("text/csv")) format = "csv";
            else if (type.starts_with("application/n-triples")) format = "nt";
            else throw ValidationError("format", "pass format=nt or format=csv");
        }
        const std::string source = req.has_param("source") ? req.get_param_value("source") : "ground-truth";
        const bool dry_run = req.has_param("dry_run") && truthy(req.get_param_value("dry_run"));
        const auto summary = ws.ingest_ground_truth(req.body, parse_ground_truth_format(format), source, dry_run);
        send_json(res, 200, to_json(summary));
    }));

    server.Post("/media", guarded([&ws, authorized](const httplib::Request& req, httplib::Response& res) {
        if (!authorized(req, res)) return;
        MediaSubmission sub = req.is_multipart_form_data() ? multipart_submission(req)
                                                            : submission_from_json(json::parse(req.body));
        const MediaId id = sub.item.id;
        const std::string job = ws.submit_media(std::move(sub));
        send_json(res, 202, {{"job_id", job}, {"media_id", id}, {"status", "/jobs/" + job}});
    }));

    server.Get("/jobs/:id", guarded([&ws](const httplib::Request& req, httplib::Response& res) {
        const auto job = ws.job(req.path_params.at("id"));
        if (!job) throw NotFound("unknown job '" + req.path_params.at("id") + "'");
        send_json(res, 200, to_json(*job));
    }));

    server.Get("/media/:id", guarded([&ws](const httplib::Request& req, httplib::Response& res) {
        const auto item = ws.media(req.path_params.at("id"));
        if (!item) throw NotFound("unknown media '" + req.path_params.at("id") + "'");
        send_json(res, 200, json(*item));
    }));

    server.Get("/media/:id/report", guarded([&ws](const httplib::Request& req, httplib::Response& res) {
        send_json(res, 200, to_json(ws.report(req.path_params.at("id"))));
    }));

    server.Get("/statements", guarded([&ws](const httplib::Request& req, httplib::Response& res) {
        StatementQuery q;
        if (req.has_param("media_id")) q.media_id = req.get_param_value("media_id");
        if (req.has_param("status")) q.status = parse_review_status(req.get_param_value("status"));
        q.page = size_param(req, "page", 1);
        q.page_size = size_param(req, "page_size", ws.config().page_size);
        send_json(res, 200, to_json(ws.statements(q)));
    }));

    server.Get("/statements/:id", guarded([&ws](const httplib::Request& req, httplib::Response& res) {
        const auto st = ws.statement(req.path_params.at("id"));
        if (!st) throw NotFound("unknown statement '" + req.path_params.at("id") + "'");
        send_json(res, 200, to_json(*st));
    }));

    server.Post("/statements/:id/review", guarded([&ws, authorized](const httplib::Request& req, httplib::Response& res) {
        if (!authorized(req, res)) return;
        const auto id = req.path_params.at("id");
        if (!ws.statement(id)) throw NotFound("unknown statement '" + id + "'");
        const auto action = review_action_from_json(json::parse(req.body));
        send_json(res, 200, to_json(ws.review(id, action)));
    }));

    server.Get("/search", guarded([&ws](const httplib::Request& req, httplib::Response& res) {
        const std::multimap<std::string, std::string> params(req.params.begin(), req.params.end());
        send_json(res, 200, search_response(ws.search(media_filter_from_params(params))));
    }));

    server.Get("/graph/stats", guarded([&ws](const httplib::Request&, httplib::Response& res) {
        send_json(res, 200, to_json(ws.stats()));
    }));

    server.Post("/lexicon/reload", guarded([&ws, authorized](const httplib::Request& req, httplib::Response& res) {
        if (!authorized(req, res)) return;
        ws.reload_lexicon();
        send_json(res, 200, {{"ok", true}});
    }));
}

bool run_service(Workspace& ws) {
    httplib::Server server;
    server.new_task_queue = [] { return new httplib::ThreadPool(8); };
    mount_api(server, ws);
    const auto& cfg = ws.config();
    int port = cfg.port;
    if (port == 0) {
        port = server.bind_to_any_port(cfg.host);
        if (port < 0) return false;
    } else if (!server.bind_to_port(cfg.host, port)) {
        return false;
    }
    std::printf("{\"listening\":\"%s:%d\"}\n", cfg.host.c_str(), port);
    std::fflush(stdout);
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    const bool ok = server.listen_after_bind();
    g_server = nullptr;
    return ok;
}

void stop_service() {
    if (g_server) g_server->stop();
}

}  // namespace scicheck
