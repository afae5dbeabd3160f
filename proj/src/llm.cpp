#include "scicheck/statements.hpp"

#include "scicheck/io.hpp"
#include "scicheck/term.hpp"

#include <httplib.h>
#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <map>

namespace scicheck {

using json = nlohmann::json;

void ExtractorConfig::validate() const {
    if (prompt_template.find("{sentence}") == std::string::npos) {
        throw ValidationError("prompt_template", "must contain {sentence}");
    }
    if (timeout_ms <= 0) throw ValidationError("timeout_ms", "must be positive");
    if (max_retries < 0) throw ValidationError("max_retries", "must be >= 0");
}

std::string ExtractorConfig::render_prompt(std::string_view sentence) const {
    std::string out = prompt_template;
    for (std::size_t pos = out.find("{sentence}"); pos != std::string::npos;
         pos = out.find("{sentence}", pos + sentence.size())) {
        out.replace(pos, 10, sentence);
    }
    return out;
}

std::string default_prompt_template() { return read_file(data_dir() / "prompt_template.txt"); }

ExtractorConfig extractor_config_from_json(const json& j) {
    ExtractorConfig cfg;
    cfg.endpoint_url = j.value("endpoint_url", "");
    cfg.model_name = j.value("model_name", "");
    cfg.api_key = j.value("api_key", "");
    if (j.contains("prompt_template")) {
        cfg.prompt_template = j.at("prompt_template").get<std::string>();
    } else if (j.contains("prompt_template_file")) {
        cfg.prompt_template = read_file(j.at("prompt_template_file").get<std::string>());
    } else {
        cfg.prompt_template = default_prompt_template();
    }
    cfg.timeout_ms = j.value("timeout_ms", cfg.timeout_ms);
    cfg.max_retries = j.value("max_retries", cfg.max_retries);
    cfg.temperature = j.value("temperature", cfg.temperature);
    if (const char* env = std::getenv("SCICHECK_LLM_ENDPOINT"); env && *env) cfg.endpoint_url = env;
    if (const char* env = std::getenv("SCICHECK_LLM_API_KEY"); env && *env) cfg.api_key = env;
    cfg.validate();
    return cfg;
}

HttpLlmTransport::HttpLlmTransport(ExtractorConfig config) : config_(std::move(config)) {}

std::string HttpLlmTransport::complete(const json& request) {
    const std::string& url = config_.endpoint_url;
    const std::size_t scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw TransportFailure("endpoint_url must be absolute: " + url);
    const std::size_t path_start = url.find('/', scheme_end + 3);
    const std::string origin = url.substr(0, path_start);
    const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

    httplib::Client client(origin);
    const auto timeout = std::chrono::milliseconds(config_.timeout_ms);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    httplib::Headers headers;
    if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

    auto res = client.Post(path, headers, request.dump(), "application/json");
    if (!res) throw TransportFailure("request failed: " + httplib::to_string(res.error()));
    if (res->status < 200 || res->status >= 300) {
        throw TransportFailure("endpoint returned HTTP " + std::to_string(res->status));
    }
    return res->body;
}

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += kHex[digest[i] >> 4];
        out += kHex[digest[i] & 0xF];
    }
    return out;
}

namespace {

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1,
                  tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms));
    return buf;
}

// Finds the outermost JSON array inside free text (e.g. wrapped in prose or
// code fences).
std::optional<json> array_in_text(std::string_view text) {
    const std::size_t open = text.find('[');
    const std::size_t close = text.rfind(']');
    if (open == std::string_view::npos || close == std::string_view::npos || close < open) return std::nullopt;
    json parsed = json::parse(text.substr(open, close - open + 1), nullptr, false);
    if (parsed.is_discarded() || !parsed.is_array()) return std::nullopt;
    return parsed;
}

std::optional<json> locate_array(const json& body) {
    if (body.is_array()) return std::optional<json>(std::in_place, body);
    if (body.is_string()) return array_in_text(body.get_ref<const std::string&>());
    if (!body.is_object()) return std::nullopt;
    for (const char* field : {"triples", "response", "completion", "text", "content", "output"}) {
        if (auto it = body.find(field); it != body.end()) {
            if (auto a = locate_array(*it)) return a;
        }
    }
    if (auto it = body.find("choices"); it != body.end() && it->is_array() && !it->empty()) {
        const json& choice = it->front();
        if (auto m = choice.find("message"); m != choice.end() && m->is_object()) {
            if (auto a = locate_array(*m)) return a;
        }
        if (auto a = locate_array(choice)) return a;
    }
    if (auto it = body.find("message"); it != body.end()) return locate_array(*it);
    return std::nullopt;
}

}  // namespace

std::vector<CandidateStatement> parse_llm_response(const MediaId& media_id, std::size_t sentence_index,
                                                   std::string_view body) {
    json parsed = json::parse(body, nullptr, false);
    std::optional<json> array = parsed.is_discarded() ? array_in_text(body) : locate_array(parsed);
    if (!array) throw UnparseableResponse(sentence_index, std::string(body), "no JSON array of triples found");

    std::vector<CandidateStatement> out;
    for (std::size_t k = 0; k < array->size(); ++k) {
        const json& item = (*array)[k];
        auto field = [&](const char* name) -> std::string {
            auto it = item.is_object() ? item.find(name) : item.end();
            if (!item.is_object() || it == item.end() || !it->is_string()) {
                throw UnparseableResponse(sentence_index, std::string(body),
                                          "element " + std::to_string(k) + " lacks string field '" + name + "'");
            }
            std::string v = collapse_whitespace(it->get<std::string>());
            if (v.empty()) {
                throw UnparseableResponse(sentence_index, std::string(body),
                                          "element " + std::to_string(k) + " has empty '" + name + "'");
            }
            return v;
        };
        auto optional_field = [&](const char* name) -> std::optional<std::string> {
            auto it = item.find(name);
            if (it == item.end() || !it->is_string()) return std::nullopt;
            std::string v = collapse_whitespace(it->get<std::string>());
            return v.empty() ? std::nullopt : std::optional<std::string>(v);
        };
        CandidateStatement c;
        c.media_id = media_id;
        c.sentence_index = sentence_index;
        c.raw_subject = field("subject");
        c.raw_predicate = field("predicate");
        c.raw_object = field("object");
        c.extractor = ExtractorKind::Llm;
        c.proposed_predicate_base = optional_field("predicate_base");
        c.proposed_subject_canonical = optional_field("subject_canonical");
        c.proposed_object_canonical = optional_field("object_canonical");
        out.push_back(std::move(c));
    }
    return out;
}

AuditLog::AuditLog(std::filesystem::path path) : path_(std::move(path)) {
    if (path_->has_parent_path()) std::filesystem::create_directories(path_->parent_path());
}

json to_json(const AuditLog::Record& r) {
    return json{{"media_id", r.media_id},
                {"sentence_index", r.sentence_index},
                {"prompt_hash", r.prompt_hash},
                {"raw_response", r.raw_response},
                {"timestamp", r.timestamp}};
}

void AuditLog::append(Record record) {
    std::lock_guard lock(mu_);
    if (path_) {
        std::ofstream out(*path_, std::ios::app | std::ios::binary);
        out << to_json(record).dump() << '\n';
        out.flush();
        if (!out) throw std::runtime_error("cannot append to audit log " + path_->string());
    }
    records_.push_back(std::move(record));
}

std::vector<AuditLog::Record> AuditLog::records() const {
    std::lock_guard lock(mu_);
    return records_;
}

LlmExtractor::LlmExtractor(ExtractorConfig config, std::shared_ptr<LlmTransport> transport,
                           std::shared_ptr<AuditLog> audit)
    : config_(std::move(config)), transport_(std::move(transport)), audit_(std::move(audit)) {
    config_.validate();
}

std::vector<CandidateStatement> LlmExtractor::extract(const MediaId& media_id, const Sentence& sentence) const {
    const std::string prompt = config_.render_prompt(sentence.text);
    const json request{{"model", config_.model_name}, {"prompt", prompt}, {"temperature", config_.temperature}};

    std::string body;
    std::string last_error;
    bool ok = false;
    for (int attempt = 0; attempt <= config_.max_retries && !ok; ++attempt) {
        try {
            body = transport_->complete(request);
            ok = true;
        } catch (const LlmTransport::TransportFailure& e) {
            last_error = e.what();
        }
    }
    if (!ok) {
        throw ExtractorTransportError(sentence.index, "LLM call failed after " +
                                                          std::to_string(config_.max_retries + 1) +
                                                          " attempt(s): " + last_error);
    }
    audit_->append({media_id, sentence.index, sha256_hex(prompt), body, utc_timestamp()});

    std::vector<CandidateStatement> out = parse_llm_response(media_id, sentence.index, body);
    for (CandidateStatement& c : out) c.grounded = check_groundedness(c, sentence.text);
    return out;
}

std::vector<CandidateStatement> check_reproducibility(const MediaId& media_id, const Sentence& sentence,
                                                      const LlmExtractor& extractor, std::size_t runs) {
    if (runs < 2) throw ValidationError("runs", "reproducibility needs at least 2 runs");
    if (extractor.config().temperature != 0.0) {
        throw ValidationError("temperature", "must be 0 for reproducibility runs");
    }
    std::vector<CandidateStatement> ordered;
    std::map<std::string, std::size_t> index;  // key -> position in `ordered`
    std::map<std::string, std::size_t> seen_in;  // key -> number of runs containing it
    for (std::size_t r = 0; r < runs; ++r) {
        std::set<std::string> this_run;
        for (CandidateStatement& c : extractor.extract(media_id, sentence)) {
            const std::string key = statement_key(c);
            if (!this_run.insert(key).second) continue;
            ++seen_in[key];
            if (index.try_emplace(key, ordered.size()).second) ordered.push_back(std::move(c));
        }
    }
    for (CandidateStatement& c : ordered) c.reproducible = seen_in[statement_key(c)] == runs;
    return ordered;
}

}  // namespace scicheck
