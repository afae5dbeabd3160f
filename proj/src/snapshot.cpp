#include "scicheck/snapshot.hpp"

#include "scicheck/error.hpp"
#include "scicheck/io.hpp"
#include "scicheck/ntriples.hpp"

#include <nlohmann/json.hpp>

#include <fstream>

namespace scicheck {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

const std::string kMetaLine = "scicheck-snapshot " + std::to_string(kSnapshotFormatVersion) + "\n";

[[noreturn]] void corrupt(const std::string& what) {
    throw Error("corrupt snapshot (expected format version " +
                std::to_string(kSnapshotFormatVersion) + "): " + what);
}

}  // namespace

SnapshotFiles snapshot(const GroundTruthGraph& graph) {
    SnapshotFiles files;
    files.meta = kMetaLine;
    std::vector<Triple> triples = graph.triples();
    files.graph_nt = serialize_ntriples(triples);
    json prov = json::object();
    for (const Triple& t : triples) prov[provenance_key(t)] = t.provenance;
    files.provenance_json = prov.dump(1) + "\n";
    return files;
}

GroundTruthGraph load(const SnapshotFiles& files) {
    if (files.meta != kMetaLine) corrupt("META is '" + files.meta.substr(0, 40) + "'");
    std::vector<Triple> triples;
    json prov;
    try {
        triples = parse_ntriples(files.graph_nt);
        prov = json::parse(files.provenance_json);
    } catch (const std::exception& e) {
        corrupt(e.what());
    }
    if (!prov.is_object()) corrupt("provenance.json is not an object");
    if (prov.size() != triples.size()) corrupt("provenance.json and graph.nt disagree on triple count");

    GroundTruthGraph graph;
    for (Triple& t : triples) {
        auto it = prov.find(provenance_key(t));
        if (it == prov.end() || !it->is_array()) corrupt("no provenance for " + provenance_key(t));
        for (const json& id : *it) {
            if (!id.is_string()) corrupt("non-string media id for " + provenance_key(t));
            t.provenance.insert(id.get<std::string>());
        }
        if (graph.add(t) == AddOutcome::Merged) corrupt("duplicate triple " + provenance_key(t));
    }
    return graph;
}

void write_snapshot(const GroundTruthGraph& graph, const fs::path& dir) {
    SnapshotFiles files = snapshot(graph);
    fs::path tmp = dir;
    tmp += ".tmp";
    fs::remove_all(tmp);
    fs::create_directories(tmp);
    write_file_durable(tmp / "graph.nt", files.graph_nt);
    write_file_durable(tmp / "provenance.json", files.provenance_json);
    write_file_durable(tmp / "META", files.meta);
    fs::path old = dir;
    old += ".old";
    fs::remove_all(old);
    if (fs::exists(dir)) fs::rename(dir, old);
    fs::rename(tmp, dir);
    fs::remove_all(old);
}

GroundTruthGraph read_snapshot(const fs::path& dir) {
    if (!fs::exists(dir / "META")) corrupt("missing META in " + dir.string());
    SnapshotFiles files;
    files.meta = read_file(dir / "META");
    files.graph_nt = read_file(dir / "graph.nt");
    files.provenance_json = read_file(dir / "provenance.json");
    return load(files);
}

}  // namespace scicheck
