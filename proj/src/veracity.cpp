#include "scicheck/veracity.hpp"

#include "scicheck/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace scicheck {

using json = nlohmann::json;
using NodeId = GroundTruthGraph::NodeId;

namespace {

// Products of integer degrees compare exactly where sums of logs would not.
using Product = unsigned __int128;

constexpr Product kSaturated = ~Product(0);

Product times(Product p, std::size_t k) {
    if (k != 0 && p > kSaturated / k) return kSaturated;
    return p * k;
}

std::size_t effective_degree(const GroundTruthGraph& g, NodeId v, DegreeMode mode) {
    return std::max<std::size_t>(1, g.node_degree(v, mode));
}

struct State {
    Product product = 1;
    std::vector<NodeId> path;
};

bool lex_less(const GroundTruthGraph& g, const std::vector<NodeId>& a, const std::vector<NodeId>& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), [&](NodeId x, NodeId y) {
        return g.node_name(x) < g.node_name(y);
    });
}

bool better(const GroundTruthGraph& g, const State& a, const State& b) {
    if (a.product != b.product) return a.product < b.product;
    if (a.path.size() != b.path.size()) return a.path.size() < b.path.size();
    return lex_less(g, a.path, b.path);
}

DegreeMode parse_degree_mode(const std::string& s) {
    if (s == "Total") return DegreeMode::Total;
    if (s == "In") return DegreeMode::In;
    if (s == "Out") return DegreeMode::Out;
    throw ValidationError("degree_mode", "expected Total, In or Out");
}

}  // namespace

void PathCheckConfig::validate() const {
    if (max_path_len < 1) throw ValidationError("max_path_len", "must be >= 1");
}

PathCheckConfig path_check_config_from_json(const json& j) {
    PathCheckConfig cfg;
    try {
        cfg.max_path_len = j.value("max_path_len", cfg.max_path_len);
        if (j.contains("degree_mode")) cfg.degree_mode = parse_degree_mode(j.at("degree_mode").get<std::string>());
    } catch (const json::exception& e) {
        throw ValidationError("path_check", e.what());
    }
    cfg.validate();
    return cfg;
}

json to_json(const PathCheckConfig& cfg) {
    const char* mode = cfg.degree_mode == DegreeMode::In ? "In" : cfg.degree_mode == DegreeMode::Out ? "Out" : "Total";
    return {{"max_path_len", cfg.max_path_len}, {"degree_mode", mode}};
}

std::optional<VeracityVerdict> check_exact(const GroundTruthGraph& graph, const Triple& t) {
    auto stored = graph.find(t.subject, t.predicate, t.object);
    if (!stored) return std::nullopt;
    VeracityVerdict v;
    v.kind = VerdictKind::ExactMatch;
    v.score = 1.0;
    v.refs.push_back(std::move(*stored));
    return v;
}

// Layered search over (node, hops). Each layer keeps, per node, the best
// prefix under (product, lexicographic path); extending by one edge preserves
// that order, so the per-layer optimum is exact. The overall optimum over
// walks is a simple path, since cutting a cycle never raises the product and
// shortens the walk.
std::optional<PathResult> path_score(const GroundTruthGraph& graph, const Term& s, const Term& o,
                                     const PathCheckConfig& cfg) {
    cfg.validate();
    if (s == o) return std::nullopt;
    const auto src = graph.node_id(s.text());
    const auto dst = graph.node_id(o.text());
    if (!src || !dst) return std::nullopt;

    std::unordered_map<NodeId, State> layer{{*src, State{1, {*src}}}};
    std::optional<State> best;
    for (int hop = 1; hop <= cfg.max_path_len && !layer.empty(); ++hop) {
        std::unordered_map<NodeId, State> next;
        for (const auto& [v, state] : layer) {
            if (v == *dst) continue;
            const Product p = hop == 1 ? state.product : times(state.product, effective_degree(graph, v, cfg.degree_mode));
            if (best && p > best->product) continue;
            for (NodeId w : graph.neighbors(v)) {
                if (w == *src) continue;
                State cand{p, state.path};
                cand.path.push_back(w);
                auto it = next.find(w);
                if (it == next.end())
                    next.emplace(w, std::move(cand));
                else if (better(graph, cand, it->second))
                    it->second = std::move(cand);
            }
        }
        if (auto it = next.find(*dst); it != next.end() && (!best || better(graph, it->second, *best)))
            best = it->second;
        layer = std::move(next);
    }
    if (!best) return std::nullopt;

    PathResult r;
    for (std::size_t i = 1; i + 1 < best->path.size(); ++i)
        r.cost += std::log(static_cast<double>(effective_degree(graph, best->path[i], cfg.degree_mode)));
    r.score = 1.0 / (1.0 + r.cost);
    for (NodeId v : best->path) r.path.push_back(graph.node_name(v));
    return r;
}

VeracityVerdict check_statement(const GroundTruthGraph& graph, const Triple& t, const PathCheckConfig& cfg,
                                const std::set<std::string>& flags) {
    VeracityVerdict v;
    if (auto exact = check_exact(graph, t)) {
        v = std::move(*exact);
    } else if (auto found = path_score(graph, t.subject, t.object, cfg)) {
        v.kind = VerdictKind::PathIndication;
        v.score = found->score;
        v.path = found->path;
        for (std::size_t i = 0; i + 1 < found->path.size(); ++i) {
            auto between = graph.triples_between(*graph.node_id(found->path[i]), *graph.node_id(found->path[i + 1]));
            v.refs.insert(v.refs.end(), between.begin(), between.end());
        }
    } else if (t.subject == t.object) {
        v.flags.insert("self-reference");
    }
    v.flags.insert(flags.begin(), flags.end());
    return v;
}

VeracityVerdict check_statement(const GroundTruthGraph& graph, const AlignedStatement& stmt,
                                const PathCheckConfig& cfg) {
    return check_statement(graph, stmt.triple, cfg, stmt.flags);
}

}  // namespace scicheck
