#pragma once

// Scripted LLM transports for offline tests.

#include "scicheck/statements.hpp"

#include <atomic>
#include <mutex>
#include <string>
#include <vector>

namespace test_support {

// Returns the scripted bodies in turn (cycling). Entries equal to "!fail"
// raise a transport failure instead.
class ScriptedTransport : public scicheck::LlmTransport {
public:
    explicit ScriptedTransport(std::vector<std::string> bodies) : bodies_(std::move(bodies)) {}

    std::string complete(const nlohmann::json& request) override {
        std::lock_guard lock(mu_);
        requests_.push_back(request);
        const std::string body = bodies_[calls_++ % bodies_.size()];
        if (body == "!fail") throw TransportFailure("connection refused (scripted)");
        return body;
    }

    std::size_t calls() const { return calls_; }
    std::vector<nlohmann::json> requests() const {
        std::lock_guard lock(mu_);
        return requests_;
    }

private:
    mutable std::mutex mu_;
    std::vector<std::string> bodies_;
    std::atomic<std::size_t> calls_{0};
    std::vector<nlohmann::json> requests_;
};

inline scicheck::ExtractorConfig mock_config() {
    scicheck::ExtractorConfig cfg;
    cfg.endpoint_url = "http://127.0.0.1:1/complete";
    cfg.model_name = "mock";
    cfg.prompt_template = "Extract triples: {sentence}";
    cfg.max_retries = 2;
    cfg.temperature = 0.0;
    return cfg;
}

}  // namespace test_support
