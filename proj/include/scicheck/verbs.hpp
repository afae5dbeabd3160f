#pragma once

#include <cstddef>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace scicheck {

// Lowercases and strips surrounding punctuation from a whitespace token.
std::string token_key(std::string_view token);
std::vector<std::string> split_tokens(std::string_view text);

// Verb phrases recognised by the rule extractor and the HTML noise filter.
class VerbLexicon {
public:
    VerbLexicon() = default;
    explicit VerbLexicon(std::vector<std::string> phrases);

    static VerbLexicon load(const std::filesystem::path& path);
    // data/predicate_verbs.txt (SCICHECK_DATA overrides the directory).
    static const VerbLexicon& defaults();

    // Length in tokens of the longest phrase starting at tokens[i], or 0.
    std::size_t match_at(const std::vector<std::string>& keys, std::size_t i) const;
    // True if any single token is (the first word of) a lexicon phrase.
    bool has_verb(const std::vector<std::string>& keys) const;
    bool empty() const { return phrases_.empty(); }

private:
    std::vector<std::vector<std::string>> phrases_;  // longest first
    std::set<std::string> heads_;
};

// Directory holding the shipped data files.
std::filesystem::path data_dir();

}  // namespace scicheck
