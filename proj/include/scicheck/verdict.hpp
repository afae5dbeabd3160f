#pragma once

#include "scicheck/triple.hpp"

#include <nlohmann/json.hpp>

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace scicheck {

enum class VerdictKind { ExactMatch, PathIndication, NoEvidence };

std::string_view to_string(VerdictKind k);
VerdictKind parse_verdict_kind(std::string_view s);

// Outcome of checking one statement against the ground truth.
//   ExactMatch     score 1, refs = the stored triple
//   PathIndication 0 < score <= 1, path from subject to object, refs = edges on it
//   NoEvidence     score 0, no refs
struct VeracityVerdict {
    VerdictKind kind = VerdictKind::NoEvidence;
    double score = 0.0;
    std::vector<std::string> path;
    std::vector<Triple> refs;
    std::set<std::string> flags;

    friend bool operator==(const VeracityVerdict& a, const VeracityVerdict& b);
};

nlohmann::json triple_to_json(const Triple& t);
Triple triple_from_json(const nlohmann::json& j);

// {kind, score, path, refs: [{s, p, o, provenance}], flags}
nlohmann::json to_json(const VeracityVerdict& v);
VeracityVerdict verdict_from_json(const nlohmann::json& j);

}  // namespace scicheck
