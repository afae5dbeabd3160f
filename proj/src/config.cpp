#include "scicheck/config.hpp"

#include "scicheck/io.hpp"

#include <cstdlib>
#include <set>

namespace scicheck {

using json = nlohmann::json;

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_relative() && !base.empty() ? base / path : path;
}

std::size_t positive(const json& j, const char* key, std::size_t fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 1) throw ValidationError(key, "must be a positive integer");
    return v.get<std::size_t>();
}

}  // namespace

PipelineOptions ServiceConfig::pipeline_options() const {
    PipelineOptions o;
    o.extractor = extractor;
    o.llm = llm;
    o.reproducibility_runs = reproducibility_runs;
    o.parallelism = extract_parallelism;
    o.path_check = path_check;
    o.scoring = scoring;
    o.policy = policy;
    return o;
}

ServiceConfig service_config_from_json(const json& j, const std::filesystem::path& base_dir) {
    if (!j.is_object()) throw ValidationError("config", "must be a JSON object");
    static const std::set<std::string> known = {"store_dir", "host",        "port",        "api_token",
                                                "lexicon",   "extractor",   "path_check",  "scoring",
                                                "parallelism", "snapshot_every", "page_size"};
    for (const auto& [k, v] : j.items())
        if (!known.contains(k)) throw ValidationError(k, "unknown configuration key");

    ServiceConfig cfg;
    try {
        if (j.contains("store_dir")) cfg.store_dir = resolve(base_dir, j.at("store_dir").get<std::string>());
        cfg.host = j.value("host", cfg.host);
        cfg.port = j.value("port", cfg.port);
        if (j.contains("api_token") && !j.at("api_token").is_null()) cfg.api_token = j.at("api_token").get<std::string>();
        if (j.contains("lexicon")) cfg.lexicon = resolve(base_dir, j.at("lexicon").get<std::string>());
        if (j.contains("extractor")) {
            json ex = j.at("extractor");
            const std::string kind = ex.value("kind", "rule");
            if (kind != "rule" && kind != "llm") throw ValidationError("extractor.kind", "expected rule or llm");
            cfg.extractor = kind == "llm" ? ExtractorKind::Llm : ExtractorKind::Rule;
            cfg.reproducibility_runs = positive(ex, "reproducibility_runs", 1);
            if (ex.contains("prompt_template_file"))
                ex["prompt_template_file"] = resolve(base_dir, ex.at("prompt_template_file").get<std::string>()).string();
            if (ex.contains("endpoint_url") || kind == "llm") cfg.llm = extractor_config_from_json(ex);
        }
        if (j.contains("path_check")) cfg.path_check = path_check_config_from_json(j.at("path_check"));
        if (j.contains("scoring")) {
            const json& sc = j.at("scoring");
            if (sc.contains("weights")) cfg.scoring = scoring_config_from_json(sc);
            if (sc.contains("policy")) cfg.policy = parse_veracity_policy(sc.at("policy").get<std::string>());
        }
        if (j.contains("parallelism")) {
            cfg.extract_parallelism = positive(j.at("parallelism"), "extract", cfg.extract_parallelism);
            cfg.job_workers = positive(j.at("parallelism"), "jobs", cfg.job_workers);
        }
        cfg.snapshot_every = positive(j, "snapshot_every", cfg.snapshot_every);
        cfg.page_size = positive(j, "page_size", cfg.page_size);
    } catch (const json::exception& e) {
        throw ValidationError("config", e.what());
    }
    if (cfg.port < 0 || cfg.port > 65535) throw ValidationError("port", "must be in 0..65535");
    return cfg;
}

ServiceConfig load_service_config(const std::filesystem::path& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw ValidationError("config", path.string() + ": " + e.what());
    }
    auto cfg = service_config_from_json(j, path.parent_path());
    apply_env_overrides(cfg);
    return cfg;
}

void apply_env_overrides(ServiceConfig& cfg) {
    if (const char* port = std::getenv("SCICHECK_PORT"); port && *port) {
        char* end = nullptr;
        const long p = std::strtol(port, &end, 10);
        if (*end != '\0' || p < 0 || p > 65535) throw ValidationError("SCICHECK_PORT", "not a valid port");
        cfg.port = static_cast<int>(p);
    }
    const char* endpoint = std::getenv("SCICHECK_LLM_ENDPOINT");
    if (!cfg.llm && endpoint && *endpoint) cfg.llm = extractor_config_from_json(json::object());
}

}  // namespace scicheck
