#pragma once

#include "scicheck/graph.hpp"

#include <filesystem>
#include <string>

namespace scicheck {

inline constexpr int kSnapshotFormatVersion = 1;

// The three files of a snapshot directory, held in memory.
struct SnapshotFiles {
    std::string meta;             // META
    std::string graph_nt;         // graph.nt
    std::string provenance_json;  // provenance.json: {"<s>|<p>|<o>": ["m1", ...]}
};

SnapshotFiles snapshot(const GroundTruthGraph& graph);
// Throws Error mentioning the expected format version on any inconsistency.
GroundTruthGraph load(const SnapshotFiles& files);

// Writes into a sibling temporary directory, then renames over `dir`.
void write_snapshot(const GroundTruthGraph& graph, const std::filesystem::path& dir);
GroundTruthGraph read_snapshot(const std::filesystem::path& dir);

}  // namespace scicheck
