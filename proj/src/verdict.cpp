#include "scicheck/verdict.hpp"

#include "scicheck/error.hpp"

namespace scicheck {

using json = nlohmann::json;

std::string_view to_string(VerdictKind k) {
    switch (k) {
        case VerdictKind::ExactMatch: return "ExactMatch";
        case VerdictKind::PathIndication: return "PathIndication";
        case VerdictKind::NoEvidence: return "NoEvidence";
    }
    return "NoEvidence";
}

VerdictKind parse_verdict_kind(std::string_view s) {
    if (s == "ExactMatch") return VerdictKind::ExactMatch;
    if (s == "PathIndication") return VerdictKind::PathIndication;
    if (s == "NoEvidence") return VerdictKind::NoEvidence;
    throw ValidationError("kind", "unknown verdict kind '" + std::string(s) + "'");
}

bool operator==(const VeracityVerdict& a, const VeracityVerdict& b) {
    if (a.kind != b.kind || a.score != b.score || a.path != b.path || a.flags != b.flags) return false;
    if (a.refs.size() != b.refs.size()) return false;
    for (std::size_t i = 0; i < a.refs.size(); ++i)
        if (!(a.refs[i] == b.refs[i]) || a.refs[i].provenance != b.refs[i].provenance) return false;
    return true;
}

json triple_to_json(const Triple& t) {
    return {{"s", t.subject.text()},
            {"p", t.predicate.text()},
            {"o", t.object.text()},
            {"provenance", json(std::vector<std::string>(t.provenance.begin(), t.provenance.end()))}};
}

Triple triple_from_json(const json& j) {
    try {
        Provenance prov;
        if (j.contains("provenance"))
            for (const auto& m : j.at("provenance")) prov.insert(m.get<std::string>());
        return Triple::of(j.at("s").get<std::string>(), j.at("p").get<std::string>(),
                          j.at("o").get<std::string>(), std::move(prov));
    } catch (const json::exception& e) {
        throw ValidationError("triple", e.what());
    }
}

json to_json(const VeracityVerdict& v) {
    json refs = json::array();
    for (const auto& t : v.refs) refs.push_back(triple_to_json(t));
    return {{"kind", to_string(v.kind)},
            {"score", v.score},
            {"path", v.path},
            {"refs", std::move(refs)},
            {"flags", json(std::vector<std::string>(v.flags.begin(), v.flags.end()))}};
}

VeracityVerdict verdict_from_json(const json& j) {
    try {
        VeracityVerdict v;
        v.kind = parse_verdict_kind(j.at("kind").get<std::string>());
        v.score = j.at("score").get<double>();
        v.path = j.value("path", std::vector<std::string>{});
        for (const auto& r : j.value("refs", json::array())) v.refs.push_back(triple_from_json(r));
        for (const auto& f : j.value("flags", json::array())) v.flags.insert(f.get<std::string>());
        return v;
    } catch (const json::exception& e) {
        throw ValidationError("verdict", e.what());
    }
}

}  // namespace scicheck
