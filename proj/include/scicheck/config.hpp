#pragma once

#include "scicheck/pipeline.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>

namespace scicheck {

// Shared by `scicheck serve` and the offline CLI commands.
//
//   {
//     "store_dir": "store",                 relative to the config file
//     "host": "127.0.0.1", "port": 8080,    SCICHECK_PORT overrides port
//     "api_token": "...",                   optional; required on writes
//     "lexicon": "lexicon.json",            optional; default data/lexicon.json
//     "extractor": {"kind": "rule" | "llm", "reproducibility_runs": 1,
//                   "endpoint_url", "model_name", "prompt_template_file", ...},
//     "path_check": {"max_path_len": 4, "degree_mode": "Total"},
//     "scoring": {"weights": {"veracity": 1.0}, "policy": "MeanScore"},
//     "parallelism": {"extract": 4, "jobs": 2},
//     "snapshot_every": 64,
//     "page_size": 50
//   }
struct ServiceConfig {
    std::filesystem::path store_dir = "scicheck-store";
    std::string host = "127.0.0.1";
    int port = 8080;
    std::optional<std::string> api_token;
    std::optional<std::filesystem::path> lexicon;
    ExtractorKind extractor = ExtractorKind::Rule;
    std::optional<ExtractorConfig> llm;
    std::size_t reproducibility_runs = 1;
    PathCheckConfig path_check;
    ScoringConfig scoring;
    VeracityPolicy policy = VeracityPolicy::MeanScore;
    std::size_t extract_parallelism = 4;
    std::size_t job_workers = 2;
    std::size_t snapshot_every = 64;  // ground-truth journal entries between snapshots
    std::size_t page_size = 50;

    PipelineOptions pipeline_options() const;
};

// Unknown keys are rejected. Relative paths resolve against `base_dir`.
ServiceConfig service_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
ServiceConfig load_service_config(const std::filesystem::path& path);
// SCICHECK_PORT; the LLM endpoint and key variables are read with the
// extractor section (and create one when only the variables are set).
void apply_env_overrides(ServiceConfig& cfg);

}  // namespace scicheck
