#pragma once

#include "scicheck/statements.hpp"
#include "scicheck/triple.hpp"
#include "scicheck/verdict.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace scicheck {

// Surface-form to canonical-term maps, plus optional external concept ids.
// Keys and values are stored normalized. Immutable after construction.
class Lexicon {
public:
    using Map = std::map<std::string, std::string>;

    Lexicon() = default;
    // Throws ValidationError naming the offending entry if a surface form maps
    // to two canonicals or a canonical is not a fixed point of its map.
    Lexicon(Map predicates, Map synonyms, Map ontology = {});

    static Lexicon from_json(const nlohmann::json& j);
    static Lexicon load(const std::filesystem::path& path);
    // data/lexicon.json
    static const Lexicon& defaults();

    nlohmann::json to_json() const;

    const Map& predicates() const noexcept { return predicates_; }
    const Map& synonyms() const noexcept { return synonyms_; }
    const Map& ontology() const noexcept { return ontology_; }

    std::optional<std::string> concept_of(const std::string& canonical) const;

private:
    Map predicates_;
    Map synonyms_;
    Map ontology_;
};

struct AlignedTerm {
    Term term;
    bool out_of_lexicon = false;
};

inline constexpr const char* kAuxiliaries[] = {"is", "are", "was", "were", "has", "have", "will"};

// Normalizes, strips leading auxiliaries (never the last token), then looks up
// the predicate map. Forms that are neither a key nor a canonical are flagged.
AlignedTerm normalize_predicate(std::string_view surface, const Lexicon& lexicon);
// Normalizes, then does a single-hop synonym lookup.
AlignedTerm canonicalize_entity(std::string_view surface, const Lexicon& lexicon);

enum class ReviewStatus { Pending, Approved, Rejected, Edited };

std::string_view to_string(ReviewStatus s);
ReviewStatus parse_review_status(std::string_view s);
// Pending -> {Approved, Rejected, Edited}; Edited -> {Approved, Rejected}.
bool can_transition(ReviewStatus from, ReviewStatus to);

struct AlignedStatement {
    Triple triple;  // canonical, provenance = candidates' media ids
    std::vector<CandidateStatement> candidates;
    ReviewStatus review_status = ReviewStatus::Pending;
    std::optional<VeracityVerdict> veracity;
    // "out-of-lexicon:subject|predicate|object", "ungrounded", "not-reproducible"
    std::set<std::string> flags;

    // Throws ValidationError("review_status") on an illegal transition.
    void transition(ReviewStatus to);
};

// Canonicalizes every candidate and merges those with the same canonical
// (s, p, o). Output is sorted by triple and candidates within a statement are
// sorted, so the result does not depend on input order. Candidates whose terms
// normalize to empty are skipped.
std::vector<AlignedStatement> align(const std::vector<CandidateStatement>& candidates,
                                    const Lexicon& lexicon);

// Canonicalizes a ground-truth triple, keeping its provenance.
Triple align_triple(const Triple& t, const Lexicon& lexicon);

// An LLM-suggested lexicon entry that differs from the current lexicon.
struct LexiconProposal {
    std::string map;  // "predicates" or "synonyms"
    std::string surface;
    std::string canonical;
    MediaId media_id;
    std::size_t sentence_index = 0;

    friend bool operator==(const LexiconProposal&, const LexiconProposal&) = default;
};

std::vector<LexiconProposal> lexicon_proposals(const std::vector<CandidateStatement>& candidates,
                                               const Lexicon& lexicon);
// Appends one JSON object per line; never modifies the lexicon itself.
void append_proposals(const std::filesystem::path& path, const std::vector<LexiconProposal>& proposals);

nlohmann::json to_json(const CandidateStatement& c);
nlohmann::json to_json(const AlignedStatement& s);
AlignedStatement aligned_from_json(const nlohmann::json& j);
CandidateStatement candidate_from_json(const nlohmann::json& j);

}  // namespace scicheck
