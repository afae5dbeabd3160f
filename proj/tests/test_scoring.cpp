#include "scicheck/scoring.hpp"

#include "doctest.h"

#include <random>

using namespace scicheck;

namespace {

VeracityVerdict verdict(VerdictKind k, double score) {
    VeracityVerdict v;
    v.kind = k;
    v.score = score;
    return v;
}

std::string violated(std::map<std::string, double> w) {
    try {
        validate_config(std::move(w));
    } catch (const ConstraintViolation& e) {
        return e.constraint();
    }
    return "";
}

}  // namespace

TEST_CASE("validate_config") {
    CHECK_NOTHROW(validate_config({{"veracity", 1.0}}));
    CHECK_NOTHROW(validate_config({{"veracity", 0.5}, {"confidence", 0.5}}));
    CHECK(violated({{"veracity", 0.4}, {"clearness", 0.6}}) == "veracity_weight_min");
    CHECK(violated({{"veracity", 0.7}, {"clearness", 0.2}}) == "weights_sum_to_one");
    CHECK(violated({{"veracity", 1.2}, {"clearness", -0.2}}) == "weights_non_negative");
    CHECK(violated({{"clearness", 1.0}}) == "veracity_weight_min");
    CHECK(violated({{"veracity", 1.0 + 5e-10}}).empty());
    CHECK(violated({{"veracity", 1.0 + 5e-9}}) == "weights_sum_to_one");
    CHECK_THROWS_AS(validate_config({{"veracity", 0.9}, {"vibes", 0.1}}), ValidationError);
    CHECK(ScoringConfig().weights() == std::map<std::string, double>{{"veracity", 1.0}});
    CHECK(scoring_config_from_json(nlohmann::json::parse(R"({"weights":{"veracity":0.6,"objectivity":0.4}})"))
              .weight("objectivity") == 0.4);
}

TEST_CASE("media_veracity") {
    std::vector<VeracityVerdict> exact(3, verdict(VerdictKind::ExactMatch, 1.0));
    CHECK(media_veracity(exact) == 1.0);
    CHECK(media_veracity(exact, VeracityPolicy::ExactOnlyMean) == 1.0);
    CHECK(media_veracity({verdict(VerdictKind::ExactMatch, 1.0), verdict(VerdictKind::NoEvidence, 0.0)}) == 0.5);
    CHECK_THROWS_AS(media_veracity({}), ValidationError);

    // Ten verdicts, recomputed by hand: (1 + 1 + 0.5 + 0.25 + 0 + 1 + 0.75 + 0 + 0.2 + 0.3) / 10.
    std::vector<VeracityVerdict> ten = {
        verdict(VerdictKind::ExactMatch, 1.0),      verdict(VerdictKind::ExactMatch, 1.0),
        verdict(VerdictKind::PathIndication, 0.5),  verdict(VerdictKind::PathIndication, 0.25),
        verdict(VerdictKind::NoEvidence, 0.0),      verdict(VerdictKind::PathIndication, 1.0),
        verdict(VerdictKind::PathIndication, 0.75), verdict(VerdictKind::NoEvidence, 0.0),
        verdict(VerdictKind::PathIndication, 0.2),  verdict(VerdictKind::PathIndication, 0.3)};
    CHECK(media_veracity(ten) == doctest::Approx(0.5));
    CHECK(media_veracity(ten, VeracityPolicy::ExactOnlyMean) == doctest::Approx(0.2));
}

TEST_CASE("accuracy_score") {
    CHECK(accuracy_score({{"veracity", 0.7}}, {}) == 0.7);
    CHECK(accuracy_score({{"veracity", 1.0}, {"confidence", 0.0}},
                         validate_config({{"veracity", 0.5}, {"confidence", 0.5}})) == 0.5);
    CHECK_THROWS_AS(accuracy_score({{"veracity", 1.0}}, validate_config({{"veracity", 0.5}, {"confidence", 0.5}})),
                    ValidationError);
    CHECK_THROWS_AS(accuracy_score({{"veracity", 1.5}}, {}), ValidationError);
}

TEST_CASE("random weight vectors match an independent dot product") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        std::map<std::string, double> w;
        double wv = 0.5 + 0.5 * u(rng);
        double rest = 1.0 - wv;
        std::vector<double> raw;
        std::vector<std::string> names;
        for (std::size_t i = 1; i < kMetrics.size(); ++i)
            if (rng() % 2) {
                names.emplace_back(kMetrics[i]);
                raw.push_back(u(rng));
            }
        double total = 0.0;
        for (double r : raw) total += r;
        for (std::size_t i = 0; i < names.size(); ++i) w[names[i]] = total > 0 ? rest * raw[i] / total : 0.0;
        w["veracity"] = names.empty() || total == 0 ? 1.0 : wv;
        const auto cfg = validate_config(w);

        std::map<std::string, double> s;
        for (auto m : kMetrics) s[std::string(m)] = u(rng);
        double dot = 0.0;
        for (const auto& [m, wi] : w) dot += wi * s[m];
        const double got = accuracy_score(s, cfg);
        CHECK(got >= 0.0);
        CHECK(got <= 1.0);
        CHECK(std::abs(got - dot) <= 1e-12);

        // Monotonicity in any positively weighted metric.
        for (const auto& [m, wi] : w) {
            if (wi <= 0) continue;
            auto bumped = s;
            bumped[m] = std::min(1.0, s[m] + 0.1);
            CHECK(accuracy_score(bumped, cfg) >= got);
        }
    }
}

TEST_CASE("report counts, skips rejected statements and names its policy") {
    std::vector<AlignedStatement> sts(4);
    sts[0].veracity = verdict(VerdictKind::ExactMatch, 1.0);
    sts[1].veracity = verdict(VerdictKind::PathIndication, 0.5);
    sts[2].veracity = verdict(VerdictKind::NoEvidence, 0.0);
    sts[3].veracity = verdict(VerdictKind::NoEvidence, 0.0);
    sts[3].review_status = ReviewStatus::Rejected;
    auto r = build_report("m1", sts);
    CHECK(r.counts.exact == 1);
    CHECK(r.counts.path == 1);
    CHECK(r.counts.none == 1);
    CHECK(*r.s_acc == doctest::Approx(0.5));
    CHECK(*r.s_acc == r.per_metric.at("veracity"));
    auto j = to_json(r);
    CHECK(j["policy"] == "MeanScore");
    CHECK(j["per_statement"].size() == 4);
    CHECK(j["counts"]["exact"] == 1);

    auto empty = build_report("m2", {});
    CHECK_FALSE(empty.s_acc);
    CHECK(to_json(empty)["s_acc"].is_null());
}
