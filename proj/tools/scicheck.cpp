// scicheck: offline pipeline runs, store management and the HTTP service.
//
// Exit codes: 0 success, 1 domain error (bad input data, constraint
// violations), 2 usage or IO error.

#include "scicheck/config.hpp"
#include "scicheck/io.hpp"
#include "scicheck/service.hpp"
#include "scicheck/workspace.hpp"

#include <CLI11.hpp>
#include <httplib.h>

#include <cstdio>
#include <iostream>
#include <iterator>
#include <regex>

using namespace scicheck;
using json = nlohmann::json;

namespace {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

bool g_pretty = false;

void print(const json& j) { std::cout << (g_pretty ? j.dump(2) : j.dump()) << "\n"; }

std::string read_input(const std::string& source) {
    if (source == "-") return std::string(std::istreambuf_iterator<char>(std::cin), {});
    if (source.starts_with("http://") || source.starts_with("https://")) {
        static const std::regex url(R"((https?://[^/]+)(/.*)?)");
        std::smatch m;
        if (!std::regex_match(source, m, url)) throw IoError("malformed URL " + source);
        httplib::Client client(m[1].str());
        client.set_follow_location(true);
        auto res = client.Get(m[2].matched ? m[2].str() : "/");
        if (!res) throw IoError("cannot fetch " + source + ": " + httplib::to_string(res.error()));
        if (res->status / 100 != 2) throw IoError("fetching " + source + " returned HTTP " + std::to_string(res->status));
        return res->body;
    }
    try {
        return read_file(source);
    } catch (const std::runtime_error& e) {
        throw IoError(e.what());
    }
}

ServiceConfig make_config(const std::string& config_path, const std::string& store) {
    ServiceConfig cfg;
    if (!config_path.empty()) {
        if (!std::filesystem::exists(config_path)) throw IoError("config file " + config_path + " not found");
        cfg = load_service_config(config_path);
    } else {
        apply_env_overrides(cfg);
    }
    if (!store.empty()) cfg.store_dir = store;
    return cfg;
}

std::shared_ptr<const Lexicon> lexicon_for(const ServiceConfig& cfg) {
    return cfg.lexicon ? std::make_shared<const Lexicon>(Lexicon::load(*cfg.lexicon))
                       : std::shared_ptr<const Lexicon>(&Lexicon::defaults(), [](const Lexicon*) {});
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Extract, align and check statements from science media against a ground-truth graph."};
    app.require_subcommand(1);
    std::string config_path, store;
    app.add_option("--config", config_path, "JSON configuration file");
    app.add_option("--store", store, "Store directory (overrides the config)");
    app.add_flag("--pretty", g_pretty, "Indent JSON output");

    auto* ingest = app.add_subcommand("ingest", "Ingest trusted ground truth into the store");
    std::string ingest_format, ingest_file, ingest_source = "ground-truth";
    bool trusted = false, dry_run = false;
    ingest->add_option("--format", ingest_format, "nt or csv")->required()->check(CLI::IsMember({"nt", "csv"}));
    ingest->add_flag("--trusted", trusted, "Confirm the file is a trusted source (required)");
    ingest->add_option("--source", ingest_source, "Provenance id for rows without one");
    ingest->add_flag("--dry-run", dry_run, "Report counts without changing the store");
    ingest->add_option("file", ingest_file, "Input file, or - for stdin")->required();

    auto* check = app.add_subcommand("check", "Run the full pipeline on one medium and print its report");
    std::string media_src, kind, extractor, media_id, gt_file, gt_format;
    check->add_option("--media", media_src, "File, URL or - for stdin")->required();
    check->add_option("--kind", kind, "plain, html, vtt or srt (default: from extension)")
        ->check(CLI::IsMember({"plain", "html", "vtt", "srt"}));
    check->add_option("--extractor", extractor, "rule or llm (default: from config)")
        ->check(CLI::IsMember({"rule", "llm"}));
    check->add_option("--media-id", media_id, "Media id (default: file name)");
    check->add_option("--ground-truth", gt_file, "Check against this file instead of the store");
    check->add_option("--gt-format", gt_format, "nt or csv (default: from extension)")
        ->check(CLI::IsMember({"nt", "csv"}));

    auto* score = app.add_subcommand("score", "Re-score extracted statements under a scoring config");
    std::string statements_file, weights_json, policy;
    std::vector<std::string> metric_values;
    score->add_option("--statements", statements_file, "Report JSON or statement array")->required();
    score->add_option("--weights", weights_json, "JSON object of metric weights");
    score->add_option("--metric", metric_values, "Externally assessed metric, name=value (repeatable)");
    score->add_option("--policy", policy, "MeanScore or ExactOnlyMean")
        ->check(CLI::IsMember({"MeanScore", "ExactOnlyMean"}));
    score->add_option("--media-id", media_id, "Media id when the input has none");

    auto* serve = app.add_subcommand("serve", "Run the HTTP service");
    int port = -1;
    serve->add_option("--port", port, "Port (overrides config and SCICHECK_PORT)");

    app.add_subcommand("stats", "Print ground-truth graph statistics");

    auto* search = app.add_subcommand("search", "Filter the media registry");
    std::map<std::string, std::string> filter_values;
    const std::vector<std::pair<std::string, std::string>> filter_flags = {
        {"--title-contains", "title_contains"},
        {"--topic", "topic"},
        {"--publisher", "publisher"},
        {"--published-after", "published_after"},
        {"--published-before", "published_before"},
        {"--min-duration", "min_duration_seconds"},
        {"--max-duration", "max_duration_seconds"},
        {"--language", "language"},
        {"--media-kind", "media_kind"}};
    for (const auto& [flag, name] : filter_flags) search->add_option(flag, filter_values[name]);
    std::string registry_file;
    search->add_option("--registry", registry_file, "Search this media JSON file instead of the store");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (ingest->parsed()) {
            if (!trusted) {
                std::cerr << "error: ground truth must come from a trusted source; pass --trusted\n";
                return 2;
            }
            const std::string body = read_input(ingest_file);
            Workspace ws(make_config(config_path, store), Workspace::Options{false, nullptr});
            print(to_json(ws.ingest_ground_truth(body, parse_ground_truth_format(ingest_format), ingest_source, dry_run)));
        } else if (check->parsed()) {
            const std::string text = read_input(media_src);
            ServiceConfig cfg = make_config(config_path, store);
            const ContentKind ck = kind.empty() ? content_kind_for(media_src) : parse_content_kind(kind);
            if (media_id.empty()) media_id = media_src == "-" ? "stdin" : std::filesystem::path(media_src).stem().string();
            auto opts = cfg.pipeline_options();
            if (!extractor.empty()) opts.extractor = extractor == "llm" ? ExtractorKind::Llm : ExtractorKind::Rule;
            const auto doc = extract_content(media_id, text, ck);
            std::vector<AlignedStatement> statements;
            if (!gt_file.empty()) {
                const auto lex = lexicon_for(cfg);
                const auto fmt = parse_ground_truth_format(
                    gt_format.empty() ? (std::filesystem::path(gt_file).extension() == ".csv" ? "csv" : "nt") : gt_format);
                GroundTruthGraph graph;
                apply_ground_truth(graph, parse_ground_truth(read_input(gt_file), fmt, "ground-truth", *lex));
                statements = run_statements(doc, opts, *lex, graph);
            } else {
                Workspace ws(cfg, Workspace::Options{false, nullptr});
                opts.proposals_file = cfg.store_dir / "lexicon_proposals.jsonl";
                statements = run_statements(doc, opts, *ws.lexicon(), [&](const auto& fn) {
                    ws.graph().read([&](const GroundTruthGraph& g) {
                        fn(g);
                        return 0;
                    });
                });
            }
            print(to_json(build_report(media_id, std::move(statements), cfg.scoring, cfg.policy)));
        } else if (score->parsed()) {
            ServiceConfig cfg = make_config(config_path, store);
            const json input = json::parse(read_input(statements_file));
            const json& list = input.is_array() ? input : input.at("per_statement");
            if (media_id.empty()) media_id = input.is_object() ? input.value("media_id", "") : "";
            std::vector<AlignedStatement> statements;
            for (const auto& s : list) statements.push_back(aligned_from_json(s));
            ScoringConfig scoring = weights_json.empty() ? cfg.scoring : scoring_config_from_json(json::parse(weights_json));
            std::map<std::string, double> external;
            for (const auto& mv : metric_values) {
                const auto eq = mv.find('=');
                if (eq == std::string::npos) throw ValidationError("metric", "expected name=value, got '" + mv + "'");
                try {
                    external[mv.substr(0, eq)] = std::stod(mv.substr(eq + 1));
                } catch (const std::exception&) {
                    throw ValidationError(mv.substr(0, eq), "not a number");
                }
            }
            const VeracityPolicy p = policy.empty() ? cfg.policy : parse_veracity_policy(policy);
            print(to_json(build_report(media_id, std::move(statements), scoring, p, external)));
        } else if (serve->parsed()) {
            ServiceConfig cfg = make_config(config_path, store);
            if (port >= 0) cfg.port = port;
            Workspace ws(cfg);
            if (!run_service(ws)) {
                std::cerr << "error: cannot listen on " << cfg.host << ":" << cfg.port << "\n";
                return 2;
            }
        } else if (app.got_subcommand("stats")) {
            Workspace ws(make_config(config_path, store), Workspace::Options{false, nullptr});
            print(to_json(ws.stats()));
        } else if (search->parsed()) {
            std::multimap<std::string, std::string> params;
            for (const auto& [name, value] : filter_values)
                if (!value.empty()) params.emplace(name, value);
            const MediaFilter filter = media_filter_from_params(params);
            if (!registry_file.empty()) {
                MediaRegistry registry;
                for (auto& item : import_media_json(read_input(registry_file))) registry.register_media(std::move(item));
                print(search_response(registry.filter(filter)));
            } else {
                Workspace ws(make_config(config_path, store), Workspace::Options{false, nullptr});
                print(search_response(ws.search(filter)));
            }
        }
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const json::exception& e) {
        std::cerr << "error: malformed JSON: " << e.what() << "\n";
        return 1;
    } catch (const std::system_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
