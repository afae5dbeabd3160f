#pragma once

#include "scicheck/alignment.hpp"
#include "scicheck/error.hpp"
#include "scicheck/verdict.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace scicheck {

inline constexpr std::array<std::string_view, 8> kMetrics = {
    "veracity",     "temporal_relevance", "confidence",  "clearness",
    "transparency", "information_depth",  "objectivity", "rationality"};

// A weight vector that broke one of the three scoring constraints.
class ConstraintViolation : public ValidationError {
public:
    ConstraintViolation(std::string constraint, const std::string& what)
        : ValidationError("weights", constraint + ": " + what), constraint_(std::move(constraint)) {}

    // "weights_non_negative", "weights_sum_to_one" or "veracity_weight_min"
    const std::string& constraint() const noexcept { return constraint_; }

private:
    std::string constraint_;
};

// Metric weights. Only a validated vector can be held; the default is
// {veracity: 1}.
class ScoringConfig {
public:
    static constexpr double kSumTolerance = 1e-9;
    static constexpr double kMinVeracityWeight = 0.5;

    ScoringConfig() : weights_{{"veracity", 1.0}} {}

    const std::map<std::string, double>& weights() const noexcept { return weights_; }
    double weight(const std::string& metric) const;

    friend ScoringConfig validate_config(std::map<std::string, double> weights);

private:
    explicit ScoringConfig(std::map<std::string, double> w) : weights_(std::move(w)) {}
    std::map<std::string, double> weights_;
};

// Throws ValidationError for unknown metrics and ConstraintViolation for the
// weight constraints (checked in the order: non-negative, sum, veracity).
ScoringConfig validate_config(std::map<std::string, double> weights);
ScoringConfig scoring_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ScoringConfig& cfg);

enum class VeracityPolicy { MeanScore, ExactOnlyMean };

std::string_view to_string(VeracityPolicy p);
VeracityPolicy parse_veracity_policy(std::string_view s);

// Mean statement score; ExactOnlyMean counts path indications as 0.
// Throws ValidationError("verdicts") for an empty list.
double media_veracity(const std::vector<VeracityVerdict>& verdicts, VeracityPolicy policy = VeracityPolicy::MeanScore);

// Sum of s_i * w_i, clamped to [0, 1]. Every metric with a nonzero weight must
// have a value in [0, 1].
double accuracy_score(const std::map<std::string, double>& per_metric, const ScoringConfig& cfg);

struct VerdictCounts {
    std::size_t exact = 0;
    std::size_t path = 0;
    std::size_t none = 0;
};

struct AccuracyReport {
    MediaId media_id;
    std::optional<double> s_acc;  // empty when the media has no scoreable statements
    std::map<std::string, double> per_metric;
    std::vector<AlignedStatement> per_statement;  // each with veracity set
    VerdictCounts counts;
    VeracityPolicy policy = VeracityPolicy::MeanScore;
    ScoringConfig config;
};

// Scores statements that already carry a verdict. Rejected statements are
// listed but do not count. `external` supplies values for non-veracity metrics.
AccuracyReport build_report(const MediaId& media_id, std::vector<AlignedStatement> statements,
                            const ScoringConfig& cfg = {}, VeracityPolicy policy = VeracityPolicy::MeanScore,
                            const std::map<std::string, double>& external = {});

nlohmann::json to_json(const AccuracyReport& r);

}  // namespace scicheck
