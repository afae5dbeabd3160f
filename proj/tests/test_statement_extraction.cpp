#include "scicheck/io.hpp"
#include "scicheck/statements.hpp"

#include "doctest.h"
#include "support/mock_llm.hpp"

#include <httplib.h>

#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <thread>

using namespace scicheck;
using json = nlohmann::json;
using test_support::ScriptedTransport;

namespace {

Sentence sentence(std::string text, std::size_t index = 0) { return Sentence{index, std::move(text), std::nullopt}; }

std::vector<std::array<std::string, 3>> spo(const std::vector<CandidateStatement>& cs) {
    std::vector<std::array<std::string, 3>> out;
    for (const auto& c : cs) out.push_back({c.raw_subject, c.raw_predicate, c.raw_object});
    return out;
}

LlmExtractor mock_extractor(std::vector<std::string> bodies) {
    return LlmExtractor(test_support::mock_config(), std::make_shared<ScriptedTransport>(std::move(bodies)));
}

}  // namespace

TEST_CASE("extract_rule basics") {
    auto out = extract_rule("m", sentence("CO2 causes warming."));
    CHECK(spo(out) == std::vector<std::array<std::string, 3>>{{"CO2", "causes", "warming"}});
    CHECK(out[0].grounded);
    CHECK(out[0].extractor == ExtractorKind::Rule);
    CHECK(extract_rule("m", sentence("Hello!")).empty());
    CHECK(extract_rule("m", sentence("")).empty());
}

TEST_CASE("extract_rule reproduces the annotated gold set") {
    const json gold = json::parse(read_file(SCICHECK_FIXTURES "/rule_gold.json"));
    REQUIRE(gold.size() == 20);
    for (std::size_t i = 0; i < gold.size(); ++i) {
        const std::string text = gold[i]["sentence"];
        CAPTURE(text);
        auto got = extract_rule("gold", sentence(text, i));
        std::vector<std::array<std::string, 3>> want;
        for (const auto& t : gold[i]["triples"]) want.push_back({t[0], t[1], t[2]});
        CHECK(spo(got) == want);
        for (const auto& c : got) {
            CHECK(c.grounded);
            CHECK(c.sentence_index == i);
        }
        // Pure: repeated calls agree exactly.
        CHECK(extract_rule("gold", sentence(text, i)) == got);
    }
}

TEST_CASE("check_groundedness") {
    CandidateStatement c;
    c.raw_subject = "CO2";
    c.raw_predicate = "causes";
    c.raw_object = "warming";
    CHECK(check_groundedness(c, "CO2 causes warming."));
    CHECK(check_groundedness(c, "co2   CAUSES\nWarming"));
    c.raw_subject = "methane";
    CHECK_FALSE(check_groundedness(c, "CO2 causes warming."));
    c.raw_subject = "Sea Level";
    c.raw_predicate = "rises";
    c.raw_object = "";
    CHECK_FALSE(check_groundedness(c, "Sea level rises."));
    c.raw_object = "glaciers";
    CHECK_FALSE(check_groundedness(c, "Sea level rises."));
    // The predicate may be a base form absent from the text.
    c.raw_subject = "CO2";
    c.raw_predicate = "cause";
    c.raw_object = "warming";
    CHECK(check_groundedness(c, "CO2 causes warming."));
}

TEST_CASE("parse_llm_response accepts common completion shapes") {
    const std::string arr = R"([{"subject":"CO2","predicate":"causes","object":"warming"}])";
    CHECK(parse_llm_response("m", 0, arr).size() == 1);
    CHECK(parse_llm_response("m", 0, json{{"response", arr}}.dump()).size() == 1);
    CHECK(parse_llm_response("m", 0, json{{"choices", {{{"message", {{"content", "```json\n" + arr + "\n```"}}}}}}}.dump()).size() == 1);
    CHECK(parse_llm_response("m", 0, "Sure! Here you go: " + arr).size() == 1);
    CHECK(parse_llm_response("m", 0, "[]").empty());
    CHECK_THROWS_AS(parse_llm_response("m", 0, "not json at all"), UnparseableResponse);
    CHECK_THROWS_AS(parse_llm_response("m", 0, R"([{"subject":"CO2","object":"warming"}])"), UnparseableResponse);
    CHECK_THROWS_AS(parse_llm_response("m", 0, R"({"response": 42})"), UnparseableResponse);
    auto hinted = parse_llm_response("m", 0, R"([{"subject":"CO2","predicate":"is causing","object":"warming","predicate_base":"cause"}])");
    CHECK(hinted[0].proposed_predicate_base == "cause");
}

TEST_CASE("extract_llm with a mock endpoint") {
    SUBCASE("round trip yields a grounded statement and an audit record") {
        auto ex = mock_extractor({R"([{"subject":"CO2","predicate":"causes","object":"warming"}])"});
        auto out = ex.extract("m1", sentence("CO2 causes warming.", 3));
        REQUIRE(out.size() == 1);
        CHECK(out[0].grounded);
        CHECK(out[0].extractor == ExtractorKind::Llm);
        CHECK(out[0].sentence_index == 3);
        auto audit = ex.audit().records();
        REQUIRE(audit.size() == 1);
        CHECK(audit[0].media_id == "m1");
        CHECK(audit[0].sentence_index == 3);
        CHECK(audit[0].raw_response == R"([{"subject":"CO2","predicate":"causes","object":"warming"}])");
        CHECK(audit[0].prompt_hash == sha256_hex("Extract triples: CO2 causes warming."));
    }
    SUBCASE("malformed JSON is an UnparseableResponse carrying the raw text") {
        auto ex = mock_extractor({"[{oops"});
        try {
            ex.extract("m", sentence("CO2 causes warming.", 5));
            FAIL("expected UnparseableResponse");
        } catch (const UnparseableResponse& e) {
            CHECK(e.raw_response() == "[{oops");
            CHECK(e.sentence_index() == 5);
        }
        CHECK(ex.audit().records().size() == 1);
    }
    SUBCASE("hallucinated subject is flagged, not dropped") {
        auto ex = mock_extractor({R"([{"subject":"unicorns","predicate":"causes","object":"warming"}])"});
        auto out = ex.extract("m", sentence("CO2 causes warming."));
        REQUIRE(out.size() == 1);
        CHECK_FALSE(out[0].grounded);
    }
    SUBCASE("transport errors retry then fail") {
        auto transport = std::make_shared<ScriptedTransport>(std::vector<std::string>{"!fail", "!fail", "[]"});
        LlmExtractor ex(test_support::mock_config(), transport);
        CHECK(ex.extract("m", sentence("x")).empty());
        CHECK(transport->calls() == 3);

        auto dead = std::make_shared<ScriptedTransport>(std::vector<std::string>{"!fail"});
        LlmExtractor ex2(test_support::mock_config(), dead);
        CHECK_THROWS_AS(ex2.extract("m", sentence("x", 9)), ExtractorTransportError);
        CHECK(dead->calls() == 3);
    }
    SUBCASE("config validation") {
        auto cfg = test_support::mock_config();
        cfg.prompt_template = "no placeholder";
        CHECK_THROWS_AS(LlmExtractor(cfg, std::make_shared<ScriptedTransport>(std::vector<std::string>{"[]"})),
                        ValidationError);
        CHECK(default_prompt_template().find("{sentence}") != std::string::npos);
    }
}

TEST_CASE("HTTP transport against a local endpoint") {
    httplib::Server server;
    json seen;
    std::string auth;
    server.Post("/v1/complete", [&](const httplib::Request& req, httplib::Response& res) {
        seen = json::parse(req.body);
        auth = req.get_header_value("Authorization");
        res.set_content(json{{"response", R"([{"subject":"CO2","predicate":"causes","object":"warming"}])"}}.dump(),
                        "application/json");
    });
    server.Post("/broken", [](const httplib::Request&, httplib::Response& res) { res.status = 500; });
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread thread([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    auto cfg = test_support::mock_config();
    cfg.endpoint_url = "http://127.0.0.1:" + std::to_string(port) + "/v1/complete";
    cfg.api_key = "secret";
    LlmExtractor ex(cfg, std::make_shared<HttpLlmTransport>(cfg));
    auto out = ex.extract("m", sentence("CO2 causes warming."));
    CHECK(out.size() == 1);
    CHECK(seen["model"] == "mock");
    CHECK(seen["prompt"] == "Extract triples: CO2 causes warming.");
    CHECK(seen["temperature"] == 0.0);
    CHECK(auth == "Bearer secret");

    auto bad = cfg;
    bad.endpoint_url = "http://127.0.0.1:" + std::to_string(port) + "/broken";
    bad.max_retries = 1;
    LlmExtractor ex2(bad, std::make_shared<HttpLlmTransport>(bad));
    CHECK_THROWS_AS(ex2.extract("m", sentence("x")), ExtractorTransportError);

    server.stop();
    thread.join();
}

TEST_CASE("check_reproducibility") {
    const std::string a = R"({"subject":"CO2","predicate":"causes","object":"warming"})";
    const std::string b = R"({"subject":"CO2","predicate":"drives","object":"warming"})";
    const std::string c = R"({"subject":"warming","predicate":"threatens","object":"CO2"})";
    const Sentence s = sentence("CO2 causes warming.");

    SUBCASE("identical outputs are all reproducible") {
        auto out = check_reproducibility("m", s, mock_extractor({"[" + a + "," + b + "]"}));
        REQUIRE(out.size() == 2);
        for (const auto& st : out) CHECK(st.reproducible == true);
    }
    SUBCASE("alternating outputs flag the non-intersecting triples") {
        auto out = check_reproducibility("m", s, mock_extractor({"[" + a + "," + b + "]", "[" + a + "," + c + "]"}));
        REQUIRE(out.size() == 3);
        std::map<std::string, bool> flags;
        for (const auto& st : out) flags[st.raw_predicate + "/" + st.raw_subject] = *st.reproducible;
        CHECK(flags["causes/CO2"]);
        CHECK_FALSE(flags["drives/CO2"]);
        CHECK_FALSE(flags["threatens/warming"]);
    }
    SUBCASE("disjoint outputs are 0% reproducible") {
        auto out = check_reproducibility("m", s, mock_extractor({"[" + a + "]", "[" + b + "]"}));
        for (const auto& st : out) CHECK(st.reproducible == false);
    }
    SUBCASE("runs=3 matches a multiset-intersection oracle") {
        std::mt19937 rng(8);
        const std::vector<std::string> pool = {a, b, c,
                                               R"({"subject":"CO2","predicate":"raises","object":"warming"})"};
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<std::string> bodies;
            std::vector<std::set<std::string>> runs;
            for (int r = 0; r < 3; ++r) {
                std::string body = "[";
                std::set<std::string> keys;
                for (std::size_t k = 0; k < pool.size(); ++k) {
                    if (rng() % 3 == 0) continue;
                    if (body.size() > 1) body += ",";
                    body += pool[k];
                    keys.insert(json::parse(pool[k])["predicate"].get<std::string>());
                }
                bodies.push_back(body + "]");
                runs.push_back(keys);
            }
            auto out = check_reproducibility("m", s, mock_extractor(bodies), 3);
            std::set<std::string> all;
            for (const auto& r : runs) all.insert(r.begin(), r.end());
            CHECK(out.size() == all.size());
            for (const auto& st : out) {
                const bool in_all = runs[0].contains(st.raw_predicate) && runs[1].contains(st.raw_predicate) &&
                                    runs[2].contains(st.raw_predicate);
                CHECK(st.reproducible == in_all);
            }
        }
    }
    SUBCASE("preconditions") {
        CHECK_THROWS_AS(check_reproducibility("m", s, mock_extractor({"[]"}), 1), ValidationError);
        auto cfg = test_support::mock_config();
        cfg.temperature = 0.7;
        LlmExtractor warm(cfg, std::make_shared<ScriptedTransport>(std::vector<std::string>{"[]"}));
        CHECK_THROWS_AS(check_reproducibility("m", s, warm), ValidationError);
    }
}

TEST_CASE("extract_document keeps order and is resumable") {
    TextDocument doc{"m", {}, SourceFormat::Plain};
    for (std::size_t i = 0; i < 40; ++i) doc.segments.push_back(sentence("CO2 causes warming number " + std::to_string(i) + ".", i));

    auto rule = [](const Sentence& s) { return extract_rule("m", s); };
    auto run = extract_document(doc, rule, 4);
    CHECK(run.complete());
    REQUIRE(run.statements.size() == 40);
    for (std::size_t i = 0; i < 40; ++i) CHECK(run.statements[i].sentence_index == i);

    std::atomic<int> fail_once{1};
    auto flaky = [&](const Sentence& s) {
        if (s.index == 17 && fail_once.exchange(0) == 1) throw ExtractorTransportError(s.index, "timeout");
        return extract_rule("m", s);
    };
    auto first = extract_document(doc, flaky, 4);
    CHECK_FALSE(first.complete());
    CHECK(first.next_sentence == 17);
    CHECK(first.statements.size() == 17);
    auto rest = extract_document(doc, flaky, 4, first.next_sentence);
    CHECK(rest.complete());
    CHECK(rest.statements.size() == 23);
    CHECK(rest.statements.front().sentence_index == 17);
}
