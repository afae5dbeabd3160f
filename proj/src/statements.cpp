#include "scicheck/statements.hpp"

#include "scicheck/io.hpp"
#include "scicheck/term.hpp"

#include <atomic>
#include <set>
#include <thread>

namespace scicheck {

std::string_view to_string(ExtractorKind k) { return k == ExtractorKind::Llm ? "Llm" : "Rule"; }

std::string statement_key(const CandidateStatement& c) {
    return normalize_text(c.raw_subject) + "|" + normalize_text(c.raw_predicate) + "|" + normalize_text(c.raw_object);
}

bool check_groundedness(const CandidateStatement& stmt, std::string_view sentence) {
    const std::string haystack = normalize_text(sentence);
    auto occurs = [&](std::string_view needle) {
        const std::string n = normalize_text(needle);
        return !n.empty() && haystack.find(n) != std::string::npos;
    };
    return occurs(stmt.raw_subject) && occurs(stmt.raw_object);
}

namespace {

const std::set<std::string> kArticles = {"the", "a", "an"};
const std::set<std::string> kAuxiliaries = {"is",   "are",   "was",  "were", "be",    "been",   "being",
                                            "has",  "have",  "had",  "will", "would", "can",    "could",
                                            "may",  "might", "shall", "should", "does", "do",   "did"};

bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() > suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::string trim_punct(std::string_view s, bool front, bool back) {
    auto punct = [](char c) {
        return c == '.' || c == ',' || c == ';' || c == ':' || c == '!' || c == '?' || c == '"' || c == '\'' ||
               c == ')' || c == '(' || c == '[' || c == ']';
    };
    std::size_t b = 0, e = s.size();
    while (front && b < e && punct(s[b])) ++b;
    while (back && e > b && punct(s[e - 1])) --e;
    return std::string(s.substr(b, e - b));
}

// Joins tokens[b, e) after dropping leading articles; trims edge punctuation.
std::string phrase(const std::vector<std::string>& tokens, const std::vector<std::string>& keys, std::size_t b,
                   std::size_t e) {
    while (b < e && kArticles.contains(keys[b])) ++b;
    std::string out;
    for (std::size_t i = b; i < e; ++i) {
        if (!out.empty()) out += ' ';
        out += tokens[i];
    }
    return trim_punct(out, true, true);
}

}  // namespace

std::vector<CandidateStatement> extract_rule(const MediaId& media_id, const Sentence& sentence,
                                             const VerbLexicon& verbs) {
    const std::vector<std::string> tokens = split_tokens(sentence.text);
    std::vector<std::string> keys;
    keys.reserve(tokens.size());
    for (const auto& t : tokens) keys.push_back(token_key(t));

    for (std::size_t i = 1; i + 1 < tokens.size(); ++i) {
        std::size_t len = verbs.match_at(keys, i);
        if (len == 0) continue;
        // "is increasing", "has been rising", "will raise"
        if (len == 1 && kAuxiliaries.contains(keys[i])) {
            std::size_t j = i + 1;
            while (j + 1 < tokens.size() &&
                   (kAuxiliaries.contains(keys[j]) || verbs.match_at(keys, j) == 1 || ends_with(keys[j], "ing") ||
                    ends_with(keys[j], "ed"))) {
                ++j;
            }
            len = j - i;
        }
        if (i + len >= tokens.size()) continue;
        std::string subject = phrase(tokens, keys, 0, i);
        std::string object = phrase(tokens, keys, i + len, tokens.size());
        if (subject.empty() || object.empty()) continue;
        std::string predicate;
        for (std::size_t k = i; k < i + len; ++k) predicate += (k > i ? " " : "") + tokens[k];

        CandidateStatement c;
        c.media_id = media_id;
        c.sentence_index = sentence.index;
        c.raw_subject = std::move(subject);
        c.raw_predicate = trim_punct(predicate, true, true);
        c.raw_object = std::move(object);
        c.extractor = ExtractorKind::Rule;
        c.grounded = check_groundedness(c, sentence.text);
        return {c};
    }
    return {};
}

DocumentExtraction extract_document(const TextDocument& doc, const SentenceExtractor& extractor,
                                    std::size_t parallelism, std::size_t resume_from) {
    const std::size_t n = doc.segments.size();
    const std::size_t first = std::min(resume_from, n);
    std::vector<std::vector<CandidateStatement>> results(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{first};
    std::atomic<std::size_t> failed_at{n};

    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n || i > failed_at.load()) return;
            try {
                results[i] = extractor(doc.segments[i]);
            } catch (...) {
                errors[i] = std::current_exception();
                std::size_t cur = failed_at.load();
                while (i < cur && !failed_at.compare_exchange_weak(cur, i)) {}
            }
        }
    };
    const std::size_t workers = std::max<std::size_t>(1, std::min(parallelism, n - first));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    DocumentExtraction out;
    out.next_sentence = n;
    for (std::size_t i = first; i < n; ++i) {
        if (errors[i]) {
            out.next_sentence = i;
            out.error = errors[i];
            break;
        }
        for (auto& c : results[i]) out.statements.push_back(std::move(c));
    }
    return out;
}

}  // namespace scicheck
