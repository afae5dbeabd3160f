#include "scicheck/alignment.hpp"

#include "scicheck/io.hpp"

#include <algorithm>
#include <fstream>
#include <tuple>

namespace scicheck {

using json = nlohmann::json;

namespace {

std::string strip_auxiliaries(const std::string& normalized) {
    std::string_view rest = normalized;
    for (;;) {
        const auto space = rest.find(' ');
        if (space == std::string_view::npos) break;
        const std::string_view head = rest.substr(0, space);
        if (std::find(std::begin(kAuxiliaries), std::end(kAuxiliaries), head) == std::end(kAuxiliaries)) break;
        rest.remove_prefix(space + 1);
    }
    return std::string(rest);
}

std::string predicate_form(std::string_view raw) { return strip_auxiliaries(normalize_text(raw)); }

bool is_canonical(const Lexicon::Map& m, const std::string& term) {
    if (m.contains(term)) return true;
    return std::any_of(m.begin(), m.end(), [&](const auto& kv) { return kv.second == term; });
}

Lexicon::Map normalize_map(const Lexicon::Map& raw, const std::string& name, std::string (*form)(std::string_view)) {
    Lexicon::Map out;
    for (const auto& [surface, canonical] : raw) {
        const std::string k = form(surface);
        const std::string v = form(canonical);
        const std::string entry = name + "[\"" + surface + "\"]";
        if (k.empty() || v.empty()) throw ValidationError(entry, "empty surface form or canonical");
        auto [it, inserted] = out.emplace(k, v);
        if (!inserted && it->second != v)
            throw ValidationError(entry, "surface form '" + k + "' maps to both '" + it->second + "' and '" + v + "'");
    }
    for (const auto& [surface, canonical] : raw) {
        const std::string v = form(canonical);
        if (auto it = out.find(v); it != out.end() && it->second != v)
            throw ValidationError(name + "[\"" + surface + "\"]",
                                  "canonical '" + v + "' is not a fixed point (maps to '" + it->second + "')");
    }
    return out;
}

Lexicon::Map read_map(const json& j, const char* key) {
    Lexicon::Map m;
    if (!j.contains(key)) return m;
    const json& obj = j.at(key);
    if (!obj.is_object()) throw ValidationError(key, "must be an object");
    for (const auto& [k, v] : obj.items()) {
        if (!v.is_string()) throw ValidationError(std::string(key) + "[\"" + k + "\"]", "must be a string");
        m.emplace(k, v.get<std::string>());
    }
    return m;
}

auto candidate_tie(const CandidateStatement& c) {
    return std::tie(c.media_id, c.sentence_index, c.raw_subject, c.raw_predicate, c.raw_object, c.extractor,
                    c.grounded, c.reproducible, c.proposed_predicate_base, c.proposed_subject_canonical,
                    c.proposed_object_canonical);
}

std::optional<std::string> optional_string(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<std::string>();
}

}  // namespace

Lexicon::Lexicon(Map predicates, Map synonyms, Map ontology)
    : predicates_(normalize_map(predicates, "predicates", &predicate_form)),
      synonyms_(normalize_map(synonyms, "synonyms", &normalize_text)) {
    for (const auto& [term, concept_id] : ontology) {
        const std::string k = normalize_text(term);
        if (k.empty() || concept_id.empty())
            throw ValidationError("ontology[\"" + term + "\"]", "empty term or concept id");
        ontology_.emplace(k, concept_id);
    }
}

Lexicon Lexicon::from_json(const json& j) {
    if (!j.is_object()) throw ValidationError("lexicon", "must be a JSON object");
    return Lexicon(read_map(j, "predicates"), read_map(j, "synonyms"), read_map(j, "ontology"));
}

Lexicon Lexicon::load(const std::filesystem::path& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw ValidationError("lexicon", path.string() + ": " + e.what());
    }
    return from_json(j);
}

const Lexicon& Lexicon::defaults() {
    static const Lexicon lex = load(data_dir() / "lexicon.json");
    return lex;
}

json Lexicon::to_json() const {
    return {{"predicates", predicates_}, {"synonyms", synonyms_}, {"ontology", ontology_}};
}

std::optional<std::string> Lexicon::concept_of(const std::string& canonical) const {
    auto it = ontology_.find(canonical);
    if (it == ontology_.end()) return std::nullopt;
    return it->second;
}

AlignedTerm normalize_predicate(std::string_view surface, const Lexicon& lexicon) {
    const std::string form = predicate_form(surface);
    const auto& m = lexicon.predicates();
    if (auto it = m.find(form); it != m.end()) return {predicate(it->second), false};
    return {predicate(form), !is_canonical(m, form)};
}

AlignedTerm canonicalize_entity(std::string_view surface, const Lexicon& lexicon) {
    const std::string form = normalize_text(surface);
    const auto& m = lexicon.synonyms();
    if (auto it = m.find(form); it != m.end()) return {entity(it->second), false};
    return {entity(form), !is_canonical(m, form)};
}

std::string_view to_string(ReviewStatus s) {
    switch (s) {
        case ReviewStatus::Pending: return "Pending";
        case ReviewStatus::Approved: return "Approved";
        case ReviewStatus::Rejected: return "Rejected";
        case ReviewStatus::Edited: return "Edited";
    }
    return "Pending";
}

ReviewStatus parse_review_status(std::string_view s) {
    if (s == "Pending") return ReviewStatus::Pending;
    if (s == "Approved") return ReviewStatus::Approved;
    if (s == "Rejected") return ReviewStatus::Rejected;
    if (s == "Edited") return ReviewStatus::Edited;
    throw ValidationError("review_status", "unknown status '" + std::string(s) + "'");
}

bool can_transition(ReviewStatus from, ReviewStatus to) {
    switch (from) {
        case ReviewStatus::Pending: return to != ReviewStatus::Pending;
        case ReviewStatus::Edited: return to == ReviewStatus::Approved || to == ReviewStatus::Rejected;
        default: return false;
    }
}

void AlignedStatement::transition(ReviewStatus to) {
    if (!can_transition(review_status, to))
        throw ValidationError("review_status", "cannot move from " + std::string(to_string(review_status)) + " to " +
                                                   std::string(to_string(to)));
    review_status = to;
}

std::vector<AlignedStatement> align(const std::vector<CandidateStatement>& candidates, const Lexicon& lexicon) {
    struct Group {
        Triple triple;
        std::vector<CandidateStatement> members;
        std::set<std::string> flags;
    };
    std::map<Triple, Group> groups;
    for (const auto& c : candidates) {
        if (normalize_text(c.raw_subject).empty() || normalize_text(c.raw_object).empty() ||
            predicate_form(c.raw_predicate).empty())
            continue;
        const AlignedTerm s = canonicalize_entity(c.raw_subject, lexicon);
        const AlignedTerm p = normalize_predicate(c.raw_predicate, lexicon);
        const AlignedTerm o = canonicalize_entity(c.raw_object, lexicon);
        Triple key(s.term, p.term, o.term);
        auto [it, inserted] = groups.try_emplace(key);
        Group& g = it->second;
        if (inserted) {
            g.triple = key;
            if (s.out_of_lexicon) g.flags.insert("out-of-lexicon:subject");
            if (p.out_of_lexicon) g.flags.insert("out-of-lexicon:predicate");
            if (o.out_of_lexicon) g.flags.insert("out-of-lexicon:object");
        }
        g.triple.provenance.insert(c.media_id);
        g.members.push_back(c);
    }

    std::vector<AlignedStatement> out;
    out.reserve(groups.size());
    for (auto& [key, g] : groups) {
        std::sort(g.members.begin(), g.members.end(),
                  [](const auto& a, const auto& b) { return candidate_tie(a) < candidate_tie(b); });
        const bool any_grounded = std::any_of(g.members.begin(), g.members.end(), [](const auto& c) { return c.grounded; });
        const bool any_repro = std::any_of(g.members.begin(), g.members.end(),
                                           [](const auto& c) { return c.reproducible == true; });
        const bool any_unrepro = std::any_of(g.members.begin(), g.members.end(),
                                             [](const auto& c) { return c.reproducible == false; });
        if (!any_grounded) g.flags.insert("ungrounded");
        if (any_unrepro && !any_repro) g.flags.insert("not-reproducible");
        AlignedStatement st;
        st.triple = std::move(g.triple);
        st.candidates = std::move(g.members);
        st.flags = std::move(g.flags);
        out.push_back(std::move(st));
    }
    return out;
}

Triple align_triple(const Triple& t, const Lexicon& lexicon) {
    return Triple(canonicalize_entity(t.subject.text(), lexicon).term,
                  normalize_predicate(t.predicate.text(), lexicon).term,
                  canonicalize_entity(t.object.text(), lexicon).term, t.provenance);
}

std::vector<LexiconProposal> lexicon_proposals(const std::vector<CandidateStatement>& candidates,
                                               const Lexicon& lexicon) {
    std::vector<LexiconProposal> out;
    auto consider = [&](const char* map, const Lexicon::Map& m, const std::string& surface,
                        const std::optional<std::string>& hint, std::string (*form)(std::string_view),
                        const CandidateStatement& c) {
        if (!hint) return;
        const std::string k = form(surface);
        const std::string v = form(*hint);
        if (k.empty() || v.empty() || k == v) return;
        if (auto it = m.find(k); it != m.end() && it->second == v) return;
        LexiconProposal p{map, k, v, c.media_id, c.sentence_index};
        if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(std::move(p));
    };
    for (const auto& c : candidates) {
        consider("predicates", lexicon.predicates(), c.raw_predicate, c.proposed_predicate_base, &predicate_form, c);
        consider("synonyms", lexicon.synonyms(), c.raw_subject, c.proposed_subject_canonical, &normalize_text, c);
        consider("synonyms", lexicon.synonyms(), c.raw_object, c.proposed_object_canonical, &normalize_text, c);
    }
    return out;
}

void append_proposals(const std::filesystem::path& path, const std::vector<LexiconProposal>& proposals) {
    if (proposals.empty()) return;
    std::string lines;
    for (const auto& p : proposals)
        lines += json{{"map", p.map},
                      {"surface", p.surface},
                      {"canonical", p.canonical},
                      {"media_id", p.media_id},
                      {"sentence_index", p.sentence_index}}
                     .dump() +
                 "\n";
    append_file_durable(path, lines);
}

json to_json(const CandidateStatement& c) {
    json j = {{"media_id", c.media_id},
              {"sentence_index", c.sentence_index},
              {"subject", c.raw_subject},
              {"predicate", c.raw_predicate},
              {"object", c.raw_object},
              {"extractor", to_string(c.extractor)},
              {"grounded", c.grounded},
              {"reproducible", c.reproducible ? json(*c.reproducible) : json(nullptr)}};
    if (c.proposed_predicate_base) j["proposed_predicate_base"] = *c.proposed_predicate_base;
    if (c.proposed_subject_canonical) j["proposed_subject_canonical"] = *c.proposed_subject_canonical;
    if (c.proposed_object_canonical) j["proposed_object_canonical"] = *c.proposed_object_canonical;
    return j;
}

CandidateStatement candidate_from_json(const json& j) {
    try {
        CandidateStatement c;
        c.media_id = j.at("media_id").get<std::string>();
        c.sentence_index = j.at("sentence_index").get<std::size_t>();
        c.raw_subject = j.at("subject").get<std::string>();
        c.raw_predicate = j.at("predicate").get<std::string>();
        c.raw_object = j.at("object").get<std::string>();
        c.extractor = j.at("extractor").get<std::string>() == "Llm" ? ExtractorKind::Llm : ExtractorKind::Rule;
        c.grounded = j.at("grounded").get<bool>();
        if (j.contains("reproducible") && !j.at("reproducible").is_null())
            c.reproducible = j.at("reproducible").get<bool>();
        c.proposed_predicate_base = optional_string(j, "proposed_predicate_base");
        c.proposed_subject_canonical = optional_string(j, "proposed_subject_canonical");
        c.proposed_object_canonical = optional_string(j, "proposed_object_canonical");
        return c;
    } catch (const json::exception& e) {
        throw ValidationError("candidate", e.what());
    }
}

json to_json(const AlignedStatement& s) {
    json cands = json::array();
    for (const auto& c : s.candidates) cands.push_back(to_json(c));
    return {{"triple", triple_to_json(s.triple)},
            {"candidates", std::move(cands)},
            {"review_status", to_string(s.review_status)},
            {"veracity", s.veracity ? to_json(*s.veracity) : json(nullptr)},
            {"flags", json(std::vector<std::string>(s.flags.begin(), s.flags.end()))}};
}

AlignedStatement aligned_from_json(const json& j) {
    try {
        AlignedStatement s;
        s.triple = triple_from_json(j.at("triple"));
        for (const auto& c : j.at("candidates")) s.candidates.push_back(candidate_from_json(c));
        s.review_status = parse_review_status(j.at("review_status").get<std::string>());
        if (j.contains("veracity") && !j.at("veracity").is_null()) s.veracity = verdict_from_json(j.at("veracity"));
        for (const auto& f : j.value("flags", json::array())) s.flags.insert(f.get<std::string>());
        return s;
    } catch (const json::exception& e) {
        throw ValidationError("statement", e.what());
    }
}

}  // namespace scicheck
