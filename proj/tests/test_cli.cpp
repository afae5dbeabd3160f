#include "scicheck/media.hpp"

#include "doctest.h"
#include "support/api_fixture.hpp"
#include "support/media_oracle.hpp"
#include "support/process.hpp"

#include <fstream>

using json = nlohmann::json;
using test_support::run_process;
using test_support::TempDir;

namespace {

const char* kCsv =
    "subject,predicate,object,source\n"
    "carbon dioxide,causes,warming,ipcc\n"
    "warming,threatens,coral reefs,ipcc\n"
    "warming,threatens,coral reefs,ipcc\n";

const char* kArticle = "CO2 causes warming. Warming threatens coral reefs. Methane drives sea level rise.";

test_support::ProcessResult cli(std::vector<std::string> args, const std::string& input = "",
                                const std::map<std::string, std::string>& env = {}) {
    args.insert(args.begin(), SCICHECK_CLI);
    return run_process(args, input, env);
}

std::filesystem::path write(const std::filesystem::path& p, const std::string& content) {
    std::ofstream(p, std::ios::binary) << content;
    return p;
}

}  // namespace

TEST_CASE("ingest prints a summary and respects --dry-run") {
    TempDir dir;
    const auto store = (dir / "store").string();
    const auto csv = write(dir / "gt.csv", kCsv).string();

    auto dry = cli({"--store", store, "ingest", "--format", "csv", "--trusted", "--dry-run", csv});
    REQUIRE(dry.exit_code == 0);
    CHECK(json::parse(dry.out) == json{{"added", 2}, {"merged", 1}, {"rejected_rows", json::array()}});
    CHECK(json::parse(cli({"--store", store, "stats"}).out)["triples"] == 0);

    auto first = cli({"--store", store, "ingest", "--format", "csv", "--trusted", csv});
    REQUIRE(first.exit_code == 0);
    CHECK(json::parse(first.out)["added"] == 2);
    auto again = cli({"--store", store, "ingest", "--format", "csv", "--trusted", "-"}, kCsv);
    CHECK(json::parse(again.out)["added"] == 0);
    CHECK(json::parse(again.out)["merged"] == 3);
    CHECK(json::parse(cli({"--store", store, "stats"}).out)["triples"] == 2);
}

TEST_CASE("exit codes") {
    TempDir dir;
    const auto store = (dir / "store").string();
    CHECK(cli({"--help"}).exit_code == 0);
    // Usage errors.
    CHECK(cli({"--store", store, "ingest", "--trusted", "x.csv"}).exit_code == 2);
    CHECK(cli({"--store", store, "ingest", "--format", "xml", "--trusted", "x"}).exit_code == 2);
    CHECK(cli({"--store", store, "frobnicate"}).exit_code == 2);
    auto untrusted = cli({"--store", store, "ingest", "--format", "csv", write(dir / "a.csv", kCsv).string()});
    CHECK(untrusted.exit_code == 2);
    CHECK(untrusted.err.find("--trusted") != std::string::npos);
    // I/O errors.
    CHECK(cli({"--store", store, "ingest", "--format", "nt", "--trusted", (dir / "missing.nt").string()}).exit_code == 2);
    // Domain errors carry a diagnostic.
    auto bad = cli({"--store", store, "ingest", "--format", "nt", "--trusted", "-"}, "<a> <b> <c> .\n<a> <b> .\n");
    CHECK(bad.exit_code == 1);
    CHECK(bad.err.find("line 2") != std::string::npos);
    CHECK(cli({"--store", store, "check", "--media", "-", "--kind", "plain"}, "   ").exit_code == 1);
    CHECK(cli({"--store", store, "search", "--registry", SCICHECK_FIXTURES "/media.json"}).exit_code == 1);
    CHECK(cli({"--store", store, "score", "--statements", "-", "--weights", R"({"veracity":0.4,"confidence":0.6})"}, "[]")
              .exit_code == 1);
    CHECK(cli({"--store", store, "score", "--statements", "-"}, "{oops").exit_code == 1);
}

TEST_CASE("check agrees with the service report") {
    TempDir dir;
    const auto store = (dir / "cli-store").string();
    const auto csv = write(dir / "gt.csv", kCsv).string();
    REQUIRE(cli({"--store", store, "ingest", "--format", "csv", "--trusted", csv}).exit_code == 0);
    const auto article = write(dir / "article.txt", kArticle).string();
    auto checked = cli({"--store", store, "check", "--media", article, "--media-id", "m1"});
    REQUIRE_MESSAGE(checked.exit_code == 0, checked.err);
    const json cli_report = json::parse(checked.out);

    test_support::ApiServer api(test_support::test_config(dir / "svc-store"));
    REQUIRE(api.client().Post("/ground-truth?format=csv", kCsv, "text/csv")->status == 200);
    auto res = api.client().Post("/media", test_support::submission("m1", kArticle).dump(), "application/json");
    REQUIRE(res->status == 202);
    REQUIRE(api.wait_job(json::parse(res->body)["job_id"])["stage"] == "Done");
    const json svc_report = json::parse(api.client().Get("/media/m1/report")->body);
    CHECK(cli_report == svc_report);
    CHECK(cli_report["counts"]["exact"] == 2);

    // Against an explicit ground-truth file, no store involved.
    auto offline = cli({"--store", (dir / "unused").string(), "check", "--media", article, "--media-id", "m1",
                        "--ground-truth", csv});
    REQUIRE(offline.exit_code == 0);
    CHECK(json::parse(offline.out)["counts"] == cli_report["counts"]);

    SUBCASE("score re-weights a saved report") {
        const auto saved = write(dir / "report.json", checked.out).string();
        auto scored = cli({"--store", store, "score", "--statements", saved, "--weights",
                           R"({"veracity":0.6,"confidence":0.4})", "--metric", "confidence=0.5"});
        REQUIRE_MESSAGE(scored.exit_code == 0, scored.err);
        const json r = json::parse(scored.out);
        const double v = cli_report["per_metric"]["veracity"];
        CHECK(r["s_acc"].get<double>() == doctest::Approx(0.6 * v + 0.4 * 0.5).epsilon(1e-12));
        auto exact_only = cli({"--store", store, "score", "--statements", saved, "--policy", "ExactOnlyMean"});
        CHECK(json::parse(exact_only.out)["s_acc"].get<double>() == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
        CHECK(cli({"--store", store, "score", "--statements", saved, "--weights", R"({"veracity":0.6,"confidence":0.4})"})
                  .exit_code == 1);
    }
}

TEST_CASE("stats on an empty store") {
    TempDir dir;
    auto r = cli({"--store", (dir / "s").string(), "--pretty", "stats"});
    REQUIRE(r.exit_code == 0);
    CHECK(json::parse(r.out) == json{{"triples", 0}, {"entities", 0}, {"predicates", 0}, {"top_degree", json::array()}});
    CHECK(r.out.find("\n  ") != std::string::npos);
}

TEST_CASE("search over a registry file matches the oracle") {
    auto r = cli({"search", "--registry", SCICHECK_FIXTURES "/media.json", "--topic", "history", "--publisher",
                  "University of Göttingen"});
    REQUIRE_MESSAGE(r.exit_code == 0, r.err);
    const json got = json::parse(r.out);

    std::ifstream in(SCICHECK_FIXTURES "/media.json");
    std::stringstream text;
    text << in.rdbuf();
    const auto items = scicheck::import_media_json(text.str());
    scicheck::MediaFilter f;
    f.topic = "history";
    f.publisher = "University of Göttingen";
    const auto want = test_support::oracle_filter(items, f);
    REQUIRE(got["total"] == want.size());
    std::vector<std::string> ids;
    for (const auto& i : got["items"]) ids.push_back(i["id"]);
    CHECK(ids == std::vector<std::string>{"v-hist-1", "v-hist-2", "p-hist-4"});
    for (std::size_t i = 0; i < want.size(); ++i) CHECK(ids[i] == want[i].id);
}

TEST_CASE("serve honours SCICHECK_PORT and stops on SIGTERM") {
    TempDir dir;
    const int port = test_support::free_port();
    test_support::ChildProcess server({SCICHECK_CLI, "--store", (dir / "store").string(), "serve"}, dir.path(),
                                      {{"SCICHECK_PORT", std::to_string(port)}});
    const json line = json::parse(server.first_line());
    CHECK(line["listening"] == "127.0.0.1:" + std::to_string(port));
    httplib::Client c("127.0.0.1", port);
    auto res = c.Get("/healthz");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(c.Post("/ground-truth?format=csv", kCsv, "text/csv")->status == 200);
    CHECK(server.kill(SIGTERM) == 0);

    // The lock is released and the data persisted.
    auto stats = cli({"--store", (dir / "store").string(), "stats"});
    CHECK(json::parse(stats.out)["triples"] == 2);
}
