#pragma once

// Completion clients: deterministic mock, transcript replay, and a live
// chat-completions HTTP client.

#include <nlohmann/json.hpp>

#include <map>
#include <memory>
#include <mutex>
#include <semaphore>
#include <string>

namespace gal {

class CompletionClient {
public:
    virtual ~CompletionClient() = default;
    virtual std::string complete(const std::string& system_text, const std::string& user_text) = 0;
    virtual std::string name() const = 0;
    /// Sampling and endpoint settings recorded in the audit log.
    virtual nlohmann::json settings() const { return nlohmann::json::object(); }
};

/// Rule-based stand-in for a model. A pure function of the prompt text:
///
///   P, F       total fire points and total FRP (MW) from the overview
///   base       median analog personnel / budget from the RAG lines;
///              without analogs, personnel 25 + 4 P and budget 2500 USD per person
///   f          0.5 + 1.5 F / (F + 500), so f lies in [0.5, 2)
///   estimate   base * f, averaged 50/50 with the previous day's value when a
///              "Previous Analysis Context" block is present
///   clamp      into [0.25 min, 4 max] of the analog values, and into any
///              range stated by a correction block
///
/// Indicators are threshold buckets of FRP, wind, mean spread potential,
/// exposed population, station count and nearest-station distance.
class MockClient : public CompletionClient {
public:
    std::string complete(const std::string& system_text, const std::string& user_text) override;
    std::string name() const override { return "mock"; }
};

/// Serves recorded responses keyed by the prompt hash (see prompt_hash()).
/// Transcript files are JSON lines holding either {"prompt_hash", "response"}
/// or audit-log records, whose attempts carry {"prompt_hash", "raw"}.
class ReplayClient : public CompletionClient {
public:
    explicit ReplayClient(const std::string& transcript_path);
    explicit ReplayClient(std::map<std::string, std::string> responses);

    std::string complete(const std::string& system_text, const std::string& user_text) override;
    std::string name() const override { return "replay"; }
    std::size_t size() const { return responses_.size(); }

private:
    std::map<std::string, std::string> responses_;
};

struct LiveSettings {
    std::string base_url = "https://api.openai.com";
    std::string path = "/v1/chat/completions";
    std::string model = "gpt-4o-mini";
    std::string api_key_env = "GAL_API_KEY";
    double temperature = 0.0;
    int timeout_s = 120;
    int retries = 2;
    int max_concurrency = 4;
};

class LiveClient : public CompletionClient {
public:
    explicit LiveClient(LiveSettings settings);

    std::string complete(const std::string& system_text, const std::string& user_text) override;
    std::string name() const override { return "live"; }
    nlohmann::json settings() const override;

private:
    LiveSettings settings_;
    std::counting_semaphore<1024> slots_;
};

} // namespace gal
