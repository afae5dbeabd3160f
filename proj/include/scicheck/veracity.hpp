#pragma once

#include "scicheck/alignment.hpp"
#include "scicheck/graph.hpp"
#include "scicheck/verdict.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace scicheck {

struct PathCheckConfig {
    int max_path_len = 4;  // hops
    DegreeMode degree_mode = DegreeMode::Total;

    void validate() const;
};

PathCheckConfig path_check_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PathCheckConfig& cfg);

struct PathResult {
    double score = 0.0;  // 1 / (1 + cost)
    double cost = 0.0;   // sum of ln k(v) over intermediate nodes
    std::vector<std::string> path;
};

// ExactMatch with the stored triple (and its provenance) if t is in the graph.
std::optional<VeracityVerdict> check_exact(const GroundTruthGraph& graph, const Triple& t);

// Least-cost path from s to o in the undirected projection, at most
// max_path_len hops. Cost is the sum of ln k(v) over intermediate nodes, with
// k(v) = max(1, degree(v, mode)). Ties go to fewer hops, then to the
// lexicographically smaller node sequence. Empty if s == o, either endpoint is
// absent, or no path is short enough.
std::optional<PathResult> path_score(const GroundTruthGraph& graph, const Term& s, const Term& o,
                                     const PathCheckConfig& cfg = {});

// Exact match, else path indication, else no evidence. The statement's flags
// are carried into the verdict.
VeracityVerdict check_statement(const GroundTruthGraph& graph, const Triple& t, const PathCheckConfig& cfg = {},
                                const std::set<std::string>& flags = {});
VeracityVerdict check_statement(const GroundTruthGraph& graph, const AlignedStatement& stmt,
                                const PathCheckConfig& cfg = {});

}  // namespace scicheck
