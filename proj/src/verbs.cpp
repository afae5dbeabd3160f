#include "scicheck/verbs.hpp"

#include "scicheck/io.hpp"
#include "scicheck/term.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <sstream>

namespace scicheck {

namespace {

bool is_edge_punct(unsigned char c) {
    return c < 0x80 && !std::isalnum(c) && c != '-' && c != '%';
}

}  // namespace

std::string token_key(std::string_view token) {
    std::size_t b = 0, e = token.size();
    while (b < e && is_edge_punct(static_cast<unsigned char>(token[b]))) ++b;
    while (e > b && is_edge_punct(static_cast<unsigned char>(token[e - 1]))) --e;
    return to_lower_utf8(token.substr(b, e - b));
}

std::vector<std::string> split_tokens(std::string_view text) {
    std::vector<std::string> out;
    std::istringstream in{std::string(text)};
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

VerbLexicon::VerbLexicon(std::vector<std::string> phrases) {
    for (const std::string& p : phrases) {
        std::vector<std::string> words;
        for (const std::string& w : split_tokens(p)) words.push_back(token_key(w));
        if (words.empty()) continue;
        heads_.insert(words.front());
        phrases_.push_back(std::move(words));
    }
    std::stable_sort(phrases_.begin(), phrases_.end(),
                     [](const auto& a, const auto& b) { return a.size() > b.size(); });
}

VerbLexicon VerbLexicon::load(const std::filesystem::path& path) {
    std::vector<std::string> phrases;
    std::istringstream in(read_file(path));
    std::string line;
    while (std::getline(in, line)) {
        std::string t = collapse_whitespace(line);
        if (t.empty() || t.front() == '#') continue;
        phrases.push_back(t);
    }
    return VerbLexicon(std::move(phrases));
}

const VerbLexicon& VerbLexicon::defaults() {
    static const VerbLexicon lexicon = load(data_dir() / "predicate_verbs.txt");
    return lexicon;
}

std::size_t VerbLexicon::match_at(const std::vector<std::string>& keys, std::size_t i) const {
    if (i >= keys.size() || !heads_.contains(keys[i])) return 0;
    for (const auto& phrase : phrases_) {
        if (i + phrase.size() > keys.size()) continue;
        if (std::equal(phrase.begin(), phrase.end(), keys.begin() + static_cast<std::ptrdiff_t>(i))) {
            return phrase.size();
        }
    }
    return 0;
}

bool VerbLexicon::has_verb(const std::vector<std::string>& keys) const {
    return std::any_of(keys.begin(), keys.end(), [&](const std::string& k) { return heads_.contains(k); });
}

std::filesystem::path data_dir() {
    if (const char* env = std::getenv("SCICHECK_DATA"); env && *env) return env;
    return SCICHECK_DATA_DIR;
}

}  // namespace scicheck
