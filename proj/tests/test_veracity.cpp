#include "scicheck/veracity.hpp"

#include "doctest.h"
#include "support/path_oracle.hpp"

#include <chrono>
#include <cmath>
#include <random>

using namespace scicheck;

namespace {

GroundTruthGraph diamond() {
    GroundTruthGraph g;
    g.add(Triple::of("A", "rel", "B", {"ipcc"}));
    g.add(Triple::of("B", "rel", "C", {"ipcc"}));
    g.add(Triple::of("B", "rel", "D", {"ipcc"}));
    g.add(Triple::of("C", "rel", "D", {"ipcc"}));
    return g;
}

GroundTruthGraph build(const std::vector<Triple>& ts) {
    GroundTruthGraph g;
    for (const auto& t : ts) g.add(t);
    return g;
}

}  // namespace

TEST_CASE("hand-built fixture") {
    const auto g = diamond();
    auto r = path_score(g, entity("A"), entity("D"));
    REQUIRE(r);
    CHECK(r->score == doctest::Approx(1.0 / (1.0 + std::log(3.0))).epsilon(1e-12));
    CHECK(r->path == std::vector<std::string>{"a", "b", "d"});
    // The detour through C costs ln 3 + ln 2.
    PathCheckConfig one;
    one.max_path_len = 1;
    CHECK_FALSE(path_score(g, entity("A"), entity("D"), one));

    auto v = check_statement(g, Triple::of("A", "causes", "D"));
    CHECK(v.kind == VerdictKind::PathIndication);
    CHECK(v.score == doctest::Approx(1.0 / (1.0 + std::log(3.0))).epsilon(1e-12));
    CHECK(v.path == std::vector<std::string>{"a", "b", "d"});
    REQUIRE(v.refs.size() == 2);
    CHECK(v.refs[0] == Triple::of("A", "rel", "B"));
    CHECK(v.refs[1] == Triple::of("B", "rel", "D"));
    CHECK(v.refs[0].provenance == Provenance{"ipcc"});
}

TEST_CASE("exact match and no evidence") {
    auto g = diamond();
    g.add(Triple::of("E", "rel", "F", {"wg1"}));
    auto v = check_statement(g, Triple::of("a", "REL", "b"));
    CHECK(v.kind == VerdictKind::ExactMatch);
    CHECK(v.score == 1.0);
    REQUIRE(v.refs.size() == 1);
    CHECK(v.refs[0].provenance == Provenance{"ipcc"});

    auto adjacent = check_statement(g, Triple::of("A", "other", "B"));
    CHECK(adjacent.kind == VerdictKind::PathIndication);
    CHECK(adjacent.score == 1.0);

    auto none = check_statement(g, Triple::of("A", "rel", "F"));
    CHECK(none.kind == VerdictKind::NoEvidence);
    CHECK(none.score == 0.0);
    CHECK(none.refs.empty());
    CHECK(check_statement(g, Triple::of("zebra", "rel", "A")).kind == VerdictKind::NoEvidence);
    CHECK(check_statement(g, Triple::of("A", "rel", "A")).flags.contains("self-reference"));

    AlignedStatement st;
    st.triple = Triple::of("A", "flibbers", "zebra");
    st.flags = {"out-of-lexicon:predicate"};
    CHECK(check_statement(g, st).flags.contains("out-of-lexicon:predicate"));
}

TEST_CASE("verdict JSON round trip") {
    auto v = check_statement(diamond(), Triple::of("A", "causes", "D"));
    auto j = to_json(v);
    CHECK(j["kind"] == "PathIndication");
    CHECK(j["refs"][0]["s"] == "a");
    CHECK(j["refs"][0]["provenance"] == nlohmann::json::array({"ipcc"}));
    CHECK(verdict_from_json(j) == v);
}

TEST_CASE("degree modes substitute only the degree") {
    // A -> B -> D and A -> C -> D; B has extra outgoing edges, C extra incoming.
    GroundTruthGraph g;
    for (auto [s, o] : std::vector<std::pair<const char*, const char*>>{
             {"A", "B"}, {"B", "D"}, {"A", "C"}, {"C", "D"}, {"B", "x1"}, {"B", "x2"}, {"y1", "C"}, {"y2", "C"}, {"y3", "C"}})
        g.add(Triple::of(s, "rel", o));
    PathCheckConfig total, in, out;
    in.degree_mode = DegreeMode::In;
    out.degree_mode = DegreeMode::Out;
    CHECK(path_score(g, entity("A"), entity("D"), total)->path[1] == "b");  // 4 < 5
    CHECK(path_score(g, entity("A"), entity("D"), in)->path[1] == "b");     // 1 < 4
    CHECK(path_score(g, entity("A"), entity("D"), out)->path[1] == "c");    // 1 < 3
    CHECK(path_score(g, entity("A"), entity("D"), in)->score == doctest::Approx(1.0));
}

TEST_CASE("oracle equivalence on random graphs") {
    std::mt19937 rng(20240611);
    const auto start = std::chrono::steady_clock::now();
    int with_path = 0;
    for (int trial = 0; trial < 1500; ++trial) {
        const auto triples = test_support::random_triples(rng, 10, 20);
        const auto g = build(triples);
        PathCheckConfig cfg;
        cfg.max_path_len = 1 + static_cast<int>(rng() % 5);
        cfg.degree_mode = static_cast<DegreeMode>(rng() % 3);
        for (int q = 0; q < 4; ++q) {
            const std::string s = "n" + std::to_string(rng() % 10);
            const std::string o = "n" + std::to_string(rng() % 10);
            auto got = path_score(g, entity(s), entity(o), cfg);
            auto want = test_support::oracle_best_path(triples, s, o, cfg.max_path_len, cfg.degree_mode);
            REQUIRE(got.has_value() == want.has_value());
            if (!got) continue;
            ++with_path;
            CHECK(got->score == doctest::Approx(1.0 / (1.0 + want->cost)).epsilon(1e-9));
            CHECK(got->path == want->nodes);
            // Validity: simple, adjacent steps, within bound.
            std::set<std::string> distinct(got->path.begin(), got->path.end());
            CHECK(distinct.size() == got->path.size());
            CHECK(static_cast<int>(got->path.size()) - 1 <= cfg.max_path_len);
            for (std::size_t i = 0; i + 1 < got->path.size(); ++i)
                CHECK_FALSE(g.triples_between(*g.node_id(got->path[i]), *g.node_id(got->path[i + 1])).empty());
            // Determinism.
            CHECK(path_score(g, entity(s), entity(o), cfg)->path == got->path);
        }
    }
    CHECK(with_path > 1000);
    CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(30));
}

TEST_CASE("path check stays fast on a large sparse graph") {
    std::mt19937 rng(3);
    GroundTruthGraph g;
    for (int i = 0; i < 25000; ++i)
        g.add(Triple::of("e" + std::to_string(rng() % 8000), "rel", "e" + std::to_string(rng() % 8000)));
    const auto start = std::chrono::steady_clock::now();
    for (int q = 0; q < 50; ++q)
        path_score(g, entity("e" + std::to_string(rng() % 8000)), entity("e" + std::to_string(rng() % 8000)));
    CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(10));
}
