#include "scicheck/graph.hpp"

#include <algorithm>

namespace scicheck {

namespace {

void insert_sorted(std::vector<GroundTruthGraph::NodeId>& v, GroundTruthGraph::NodeId id) {
    auto it = std::lower_bound(v.begin(), v.end(), id);
    if (it == v.end() || *it != id) v.insert(it, id);
}

}  // namespace

AddOutcome GroundTruthGraph::add(const Triple& t) {
    Key key{t.subject.text(), t.predicate.text(), t.object.text()};
    auto [it, inserted] = triples_.try_emplace(std::move(key), t.provenance);
    if (!inserted) {
        it->second.insert(t.provenance.begin(), t.provenance.end());
        return AddOutcome::Merged;
    }

    const NodeId s = intern(t.subject.text());
    const NodeId o = intern(t.object.text());
    ++nodes_[s].out;
    ++nodes_[o].in;
    nodes_[s].adjacency.push_back({t.predicate.text(), o, Direction::Outgoing});
    nodes_[o].adjacency.push_back({t.predicate.text(), s, Direction::Incoming});
    if (s != o) {
        insert_sorted(nodes_[s].neighbors, o);
        insert_sorted(nodes_[o].neighbors, s);
    }
    ++predicates_[t.predicate.text()];
    return AddOutcome::Added;
}

std::optional<Triple> GroundTruthGraph::find(const Term& s, const Term& p, const Term& o) const {
    auto it = triples_.find(Key{s.text(), p.text(), o.text()});
    if (it == triples_.end()) return std::nullopt;
    return materialize(it->first, it->second);
}

bool GroundTruthGraph::contains(const Triple& t) const {
    return triples_.contains(Key{t.subject.text(), t.predicate.text(), t.object.text()});
}

std::size_t GroundTruthGraph::degree(const Term& v, DegreeMode mode) const {
    auto id = node_id(v.text());
    return id ? node_degree(*id, mode) : 0;
}

std::size_t GroundTruthGraph::node_degree(NodeId id, DegreeMode mode) const {
    const Node& n = nodes_[id];
    switch (mode) {
        case DegreeMode::In: return n.in;
        case DegreeMode::Out: return n.out;
        case DegreeMode::Total: break;
    }
    return n.in + n.out;
}

std::vector<Triple> GroundTruthGraph::triples() const {
    std::vector<Triple> out;
    out.reserve(triples_.size());
    for_each([&](Triple t) { out.push_back(std::move(t)); });
    return out;
}

std::optional<GroundTruthGraph::NodeId> GroundTruthGraph::node_id(std::string_view name) const {
    auto it = ids_.find(std::string(name));
    if (it == ids_.end()) return std::nullopt;
    return it->second;
}

std::vector<Triple> GroundTruthGraph::triples_between(NodeId a, NodeId b) const {
    std::vector<Triple> out;
    for (const Adjacent& adj : nodes_[a].adjacency) {
        if (adj.other != b) continue;
        const bool forward = adj.direction == Direction::Outgoing;
        const std::string& s = forward ? names_[a] : names_[b];
        const std::string& o = forward ? names_[b] : names_[a];
        auto it = triples_.find(Key{s, adj.predicate, o});
        if (it != triples_.end()) out.push_back(materialize(it->first, it->second));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

GroundTruthGraph::NodeId GroundTruthGraph::intern(const std::string& name) {
    auto [it, inserted] = ids_.try_emplace(name, static_cast<NodeId>(names_.size()));
    if (inserted) {
        names_.push_back(name);
        nodes_.emplace_back();
    }
    return it->second;
}

Triple GroundTruthGraph::materialize(const Key& key, const Provenance& prov) {
    return Triple(Term::from_canonical(std::get<0>(key), TermKind::Entity),
                  Term::from_canonical(std::get<1>(key), TermKind::Predicate),
                  Term::from_canonical(std::get<2>(key), TermKind::Entity), prov);
}

}  // namespace scicheck
