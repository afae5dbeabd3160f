#include "scicheck/scoring.hpp"

#include <algorithm>
#include <cmath>

namespace scicheck {

using json = nlohmann::json;

double ScoringConfig::weight(const std::string& metric) const {
    auto it = weights_.find(metric);
    return it == weights_.end() ? 0.0 : it->second;
}

ScoringConfig validate_config(std::map<std::string, double> weights) {
    for (const auto& [metric, w] : weights) {
        if (std::find(kMetrics.begin(), kMetrics.end(), metric) == kMetrics.end())
            throw ValidationError("weights", "unknown metric '" + metric + "'");
    }
    double sum = 0.0;
    for (const auto& [metric, w] : weights) {
        if (!(w >= 0.0) || !std::isfinite(w))
            throw ConstraintViolation("weights_non_negative", "weight of '" + metric + "' is " + std::to_string(w));
        sum += w;
    }
    if (std::abs(sum - 1.0) > ScoringConfig::kSumTolerance)
        throw ConstraintViolation("weights_sum_to_one", "weights sum to " + std::to_string(sum));
    const double wv = weights.contains("veracity") ? weights.at("veracity") : 0.0;
    if (wv < ScoringConfig::kMinVeracityWeight)
        throw ConstraintViolation("veracity_weight_min", "veracity weight " + std::to_string(wv) + " is below 0.5");
    return ScoringConfig(std::move(weights));
}

ScoringConfig scoring_config_from_json(const json& j) {
    if (j.is_null()) return {};
    const json& w = j.contains("weights") ? j.at("weights") : j;
    if (!w.is_object()) throw ValidationError("weights", "must be an object");
    std::map<std::string, double> weights;
    for (const auto& [k, v] : w.items()) {
        if (!v.is_number()) throw ValidationError("weights", "weight of '" + k + "' must be a number");
        weights[k] = v.get<double>();
    }
    return validate_config(std::move(weights));
}

json to_json(const ScoringConfig& cfg) { return {{"weights", cfg.weights()}}; }

std::string_view to_string(VeracityPolicy p) {
    return p == VeracityPolicy::ExactOnlyMean ? "ExactOnlyMean" : "MeanScore";
}

VeracityPolicy parse_veracity_policy(std::string_view s) {
    if (s == "MeanScore") return VeracityPolicy::MeanScore;
    if (s == "ExactOnlyMean") return VeracityPolicy::ExactOnlyMean;
    throw ValidationError("policy", "expected MeanScore or ExactOnlyMean");
}

double media_veracity(const std::vector<VeracityVerdict>& verdicts, VeracityPolicy policy) {
    if (verdicts.empty()) throw ValidationError("verdicts", "media has no statements and cannot be scored");
    double sum = 0.0;
    for (const auto& v : verdicts) {
        if (policy == VeracityPolicy::ExactOnlyMean && v.kind != VerdictKind::ExactMatch) continue;
        sum += v.score;
    }
    return sum / static_cast<double>(verdicts.size());
}

double accuracy_score(const std::map<std::string, double>& per_metric, const ScoringConfig& cfg) {
    double s = 0.0;
    for (const auto& [metric, w] : cfg.weights()) {
        if (w == 0.0) continue;
        auto it = per_metric.find(metric);
        if (it == per_metric.end()) throw ValidationError(metric, "no value for a weighted metric");
        if (!(it->second >= 0.0 && it->second <= 1.0)) throw ValidationError(metric, "value must lie in [0, 1]");
        s += it->second * w;
    }
    return std::clamp(s, 0.0, 1.0);
}

AccuracyReport build_report(const MediaId& media_id, std::vector<AlignedStatement> statements,
                            const ScoringConfig& cfg, VeracityPolicy policy,
                            const std::map<std::string, double>& external) {
    AccuracyReport r;
    r.media_id = media_id;
    r.policy = policy;
    r.config = cfg;
    std::vector<VeracityVerdict> verdicts;
    for (const auto& st : statements) {
        if (st.review_status == ReviewStatus::Rejected || !st.veracity) continue;
        verdicts.push_back(*st.veracity);
        switch (st.veracity->kind) {
            case VerdictKind::ExactMatch: ++r.counts.exact; break;
            case VerdictKind::PathIndication: ++r.counts.path; break;
            case VerdictKind::NoEvidence: ++r.counts.none; break;
        }
    }
    r.per_statement = std::move(statements);
    if (verdicts.empty()) return r;
    r.per_metric = external;
    r.per_metric["veracity"] = media_veracity(verdicts, policy);
    r.s_acc = accuracy_score(r.per_metric, cfg);
    return r;
}

json to_json(const AccuracyReport& r) {
    json statements = json::array();
    for (const auto& st : r.per_statement) statements.push_back(to_json(st));
    return {{"media_id", r.media_id},
            {"s_acc", r.s_acc ? json(*r.s_acc) : json(nullptr)},
            {"per_metric", r.per_metric},
            {"per_statement", std::move(statements)},
            {"counts", {{"exact", r.counts.exact}, {"path", r.counts.path}, {"none", r.counts.none}}},
            {"policy", to_string(r.policy)},
            {"weights", r.config.weights()}};
}

}  // namespace scicheck
