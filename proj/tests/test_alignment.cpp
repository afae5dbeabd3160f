#include "scicheck/alignment.hpp"

#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <random>

using namespace scicheck;
using json = nlohmann::json;

namespace {

CandidateStatement cand(std::string s, std::string p, std::string o, std::string media, std::size_t idx = 0) {
    CandidateStatement c;
    c.media_id = std::move(media);
    c.sentence_index = idx;
    c.raw_subject = std::move(s);
    c.raw_predicate = std::move(p);
    c.raw_object = std::move(o);
    c.grounded = true;
    return c;
}

Lexicon small() {
    return Lexicon({{"increasing", "increase"}, {"causes", "causes"}}, {{"carbon dioxide", "co2"}, {"a", "b"}},
                   {{"co2", "ex:CO2"}});
}

}  // namespace

TEST_CASE("normalize_predicate") {
    const auto lex = small();
    auto r = normalize_predicate("is increasing", lex);
    CHECK(r.term.text() == "increase");
    CHECK_FALSE(r.out_of_lexicon);
    CHECK(normalize_predicate("  Causes ", lex).term.text() == "causes");
    CHECK_FALSE(normalize_predicate("causes", lex).out_of_lexicon);
    auto f = normalize_predicate("flibbers", lex);
    CHECK(f.term.text() == "flibbers");
    CHECK(f.out_of_lexicon);
    CHECK(normalize_predicate("has been increasing", lex).term.text() == "been increasing");
    CHECK(normalize_predicate("will have increasing", lex).term.text() == "increase");
    CHECK(normalize_predicate("is", lex).term.text() == "is");
}

TEST_CASE("canonicalize_entity") {
    const auto lex = small();
    CHECK(canonicalize_entity("Carbon  Dioxide", lex).term.text() == "co2");
    auto co2 = canonicalize_entity("CO2", lex);
    CHECK(co2.term.text() == "co2");
    CHECK_FALSE(co2.out_of_lexicon);
    CHECK(canonicalize_entity("a", lex).term.text() == "b");
    CHECK(canonicalize_entity("b", lex).term.text() == "b");
    CHECK(canonicalize_entity("unicorn", lex).out_of_lexicon);
    CHECK(lex.concept_of("co2") == "ex:CO2");
}

TEST_CASE("lexicon invariants are enforced at load") {
    CHECK_THROWS_WITH_AS(Lexicon({}, {{"a", "b"}, {"b", "c"}}), doctest::Contains("not a fixed point"), ValidationError);
    CHECK_NOTHROW(Lexicon({}, {{"a", "b"}, {"b", "b"}}));
    CHECK_THROWS_WITH_AS(Lexicon({}, {{"CO2", "x"}, {"co2", "y"}}), doctest::Contains("maps to both"), ValidationError);
    CHECK(Lexicon({{"raises", "is raising"}}, {}).predicates().at("raises") == "raising");
    try {
        Lexicon::from_json(json::parse(R"({"synonyms": {"ghg": "greenhouse gases", "greenhouse gases": "ghg"}})"));
        FAIL("expected rejection");
    } catch (const ValidationError& e) {
        CHECK(e.field().find("synonyms[") == 0);
    }
    CHECK_THROWS_AS(Lexicon::from_json(json::parse(R"({"predicates": {"x": 3}})")), ValidationError);

    const auto& d = Lexicon::defaults();
    CHECK(canonicalize_entity("carbon dioxide", d).term.text() == "co2");
    CHECK(normalize_predicate("causes", d).term.text() == "causes");
    // Every shipped canonical is a fixed point.
    for (const auto& [k, v] : d.predicates()) CHECK(normalize_predicate(v, d).term.text() == v);
    for (const auto& [k, v] : d.synonyms()) CHECK(canonicalize_entity(v, d).term.text() == v);
    CHECK(Lexicon::from_json(d.to_json()).synonyms() == d.synonyms());
}

TEST_CASE("align merges synonyms and unions provenance") {
    const auto lex = small();
    auto out = align({cand("CO2", "causes", "warming", "m1"), cand("carbon dioxide", "causes", "warming", "m2")}, lex);
    REQUIRE(out.size() == 1);
    CHECK(out[0].triple == Triple::of("co2", "causes", "warming"));
    CHECK(out[0].triple.provenance == Provenance{"m1", "m2"});
    CHECK(out[0].candidates.size() == 2);
    CHECK(out[0].review_status == ReviewStatus::Pending);
    CHECK(out[0].flags == std::set<std::string>{"out-of-lexicon:object"});
    CHECK(align({}, lex).empty());
}

TEST_CASE("align is permutation invariant and idempotent") {
    const auto lex = Lexicon::defaults();
    std::mt19937 rng(5);
    const std::vector<std::string> subjects = {"CO2", "carbon dioxide", "Methane", "CH4", "sea-level rise", "ice"};
    const std::vector<std::string> preds = {"causes", "caused", "is increasing", "raises", "affects", "flibbers"};
    const std::vector<std::string> objects = {"warming", "global warming", "storms", "ice loss"};
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<CandidateStatement> cs;
        const int n = 1 + static_cast<int>(rng() % 30);
        for (int i = 0; i < n; ++i) {
            auto c = cand(subjects[rng() % subjects.size()], preds[rng() % preds.size()], objects[rng() % objects.size()],
                          "m" + std::to_string(rng() % 5), rng() % 4);
            c.grounded = rng() % 5 != 0;
            cs.push_back(c);
        }
        const auto base = align(cs, lex);
        std::shuffle(cs.begin(), cs.end(), rng);
        const auto shuffled = align(cs, lex);
        REQUIRE(base.size() == shuffled.size());
        for (std::size_t i = 0; i < base.size(); ++i) {
            CHECK(to_json(base[i]) == to_json(shuffled[i]));
            Provenance expect;
            for (const auto& c : base[i].candidates) expect.insert(c.media_id);
            CHECK(base[i].triple.provenance == expect);
            if (i > 0) CHECK(base[i - 1].triple < base[i].triple);
        }
        // Idempotence: realigning canonical surface forms is a no-op.
        for (const auto& st : base) {
            auto again = align({cand(st.triple.subject.text(), st.triple.predicate.text(), st.triple.object.text(), "x")}, lex);
            REQUIRE(again.size() == 1);
            CHECK(again[0].triple == st.triple);
        }
    }
}

TEST_CASE("review transitions") {
    AlignedStatement st;
    CHECK_THROWS_AS(st.transition(ReviewStatus::Pending), ValidationError);
    st.transition(ReviewStatus::Edited);
    CHECK_THROWS_AS(st.transition(ReviewStatus::Edited), ValidationError);
    st.transition(ReviewStatus::Approved);
    CHECK_THROWS_AS(st.transition(ReviewStatus::Rejected), ValidationError);
    AlignedStatement r;
    r.transition(ReviewStatus::Rejected);
    CHECK_THROWS_AS(r.transition(ReviewStatus::Approved), ValidationError);
    CHECK(parse_review_status("Edited") == ReviewStatus::Edited);
}

TEST_CASE("LLM hints become pending proposals, never lexicon edits") {
    const auto lex = small();
    auto c = cand("Carbon Dioxide", "is rising", "warming", "m1", 2);
    c.extractor = ExtractorKind::Llm;
    c.proposed_predicate_base = "rise";
    c.proposed_subject_canonical = "co2";
    c.proposed_object_canonical = "global warming";
    auto props = lexicon_proposals({c, c}, lex);
    REQUIRE(props.size() == 2);
    CHECK(props[0] == LexiconProposal{"predicates", "rising", "rise", "m1", 2});
    CHECK(props[1] == LexiconProposal{"synonyms", "warming", "global warming", "m1", 2});

    const auto path = std::filesystem::temp_directory_path() / "scicheck_proposals_test.jsonl";
    std::filesystem::remove(path);
    append_proposals(path, props);
    append_proposals(path, props);
    std::ifstream in(path);
    int lines = 0;
    for (std::string line; std::getline(in, line); ++lines) CHECK(json::parse(line).contains("canonical"));
    CHECK(lines == 4);
    std::filesystem::remove(path);
    CHECK(normalize_predicate("is rising", lex).out_of_lexicon);
}

TEST_CASE("statement JSON round trip") {
    auto st = align({cand("CO2", "causes", "warming", "m1")}, small()).front();
    st.candidates[0].reproducible = false;
    st.veracity = VeracityVerdict{VerdictKind::ExactMatch, 1.0, {}, {Triple::of("co2", "causes", "warming", {"gt"})}, {}};
    auto back = aligned_from_json(to_json(st));
    CHECK(to_json(back) == to_json(st));
    CHECK(back.candidates == st.candidates);
}
