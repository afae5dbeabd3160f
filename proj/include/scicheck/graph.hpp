#pragma once

#include "scicheck/triple.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

namespace scicheck {

enum class DegreeMode { Total, In, Out };

enum class AddOutcome { Added, Merged };

// In-memory ground-truth knowledge graph.
//
// Triples are kept in a sorted map keyed by (s, p, o) so iteration and
// serialization are deterministic. Entities are interned to dense ids; each
// node carries its in/out degree, its directed adjacency and the neighbor set
// of the undirected projection used by the path check.
//
// Not internally synchronized. Share it behind a reader/writer lock
// (see SharedGraph in workspace.hpp).
class GroundTruthGraph {
public:
    using NodeId = std::uint32_t;

    enum class Direction : std::uint8_t { Outgoing, Incoming };

    struct Adjacent {
        std::string predicate;
        NodeId other;
        Direction direction;
    };

    // Inserts t, or unions its provenance into the stored copy.
    AddOutcome add(const Triple& t);

    std::optional<Triple> find(const Term& s, const Term& p, const Term& o) const;
    bool contains(const Triple& t) const;

    // Absent nodes have degree 0.
    std::size_t degree(const Term& v, DegreeMode mode) const;

    std::size_t size() const noexcept { return triples_.size(); }
    bool empty() const noexcept { return triples_.empty(); }
    std::size_t entity_count() const noexcept { return names_.size(); }
    std::size_t predicate_count() const noexcept { return predicates_.size(); }

    // All triples in (s, p, o) order.
    std::vector<Triple> triples() const;

    template <typename Fn>
    void for_each(Fn&& fn) const {
        for (const auto& [key, prov] : triples_) fn(materialize(key, prov));
    }

    // Node-level access for graph algorithms.
    std::optional<NodeId> node_id(std::string_view name) const;
    const std::string& node_name(NodeId id) const { return names_[id]; }
    std::size_t node_degree(NodeId id, DegreeMode mode) const;
    // Sorted, deduplicated neighbors in the undirected projection (no self loops).
    std::span<const NodeId> neighbors(NodeId id) const { return nodes_[id].neighbors; }
    std::span<const Adjacent> adjacency(NodeId id) const { return nodes_[id].adjacency; }
    // Every stored triple linking a and b in either direction, sorted.
    std::vector<Triple> triples_between(NodeId a, NodeId b) const;

    friend bool operator==(const GroundTruthGraph& a, const GroundTruthGraph& b) {
        return a.triples_ == b.triples_;
    }

private:
    using Key = std::tuple<std::string, std::string, std::string>;

    struct Node {
        std::size_t in = 0;
        std::size_t out = 0;
        std::vector<Adjacent> adjacency;
        std::vector<NodeId> neighbors;
    };

    NodeId intern(const std::string& name);
    static Triple materialize(const Key& key, const Provenance& prov);

    std::map<Key, Provenance> triples_;
    std::vector<std::string> names_;
    std::unordered_map<std::string, NodeId> ids_;
    std::vector<Node> nodes_;
    std::map<std::string, std::size_t> predicates_;
};

}  // namespace scicheck
