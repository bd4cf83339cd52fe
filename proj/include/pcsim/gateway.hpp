#pragma once

#include <functional>
#include <memory>
#include <string>
#include <string_view>

#include "pcsim/agent.hpp"
#include "pcsim/errors.hpp"
#include "pcsim/transcript.hpp"

namespace pcsim {

inline constexpr const char* kApiKeyEnv = "GENAINET_API_KEY";

struct GatewayConfig {
    /// Endpoint root, e.g. "https://api.example.com/v1"; requests go to
    /// {base_url}/chat/completions.
    std::string base_url;
    std::string model_name;
    double temperature = 0.2;
    int max_tokens = 512;
    double timeout_s = 60.0;
    int max_retries = 3;
    double backoff_base_s = 1.0;
    double backoff_factor = 2.0;
    /// Never written to logs or artifacts.
    std::string api_key;

    /// Reads the API key from GENAINET_API_KEY; empty if unset.
    static std::string api_key_from_env();
    /// Everything except the key, for provenance records.
    nlohmann::json to_json() const;
};

struct GatewayError : Error {
    enum class Kind { timeout, http_status, malformed_response, transport };

    GatewayError(Kind kind, std::string what, int status = 0)
        : Error(std::move(what)), kind(kind), status(status) {}

    Kind kind;
    /// HTTP status for Kind::http_status.
    int status;
};

/// OpenAI-compatible chat-completions client with retry and backoff.
///
/// Timeouts, transport failures, 429 and 5xx responses are retried up to
/// max_retries times, sleeping backoff_base_s * backoff_factor^k before retry
/// k. Other statuses and malformed bodies fail immediately. Every attempt is
/// appended to the transcript sink, if one is set.
class ChatGateway {
public:
    using Sleeper = std::function<void(double seconds)>;

    explicit ChatGateway(GatewayConfig config, std::shared_ptr<TranscriptSink> transcript = nullptr);

    /// Replaces the real sleep, mainly for tests.
    void set_sleeper(Sleeper sleeper) { sleeper_ = std::move(sleeper); }

    /// System message plus one user message carrying user_text and
    /// memory_text separated by a blank line. Returns choices[0].message.content.
    std::string chat_complete(std::string_view system_text, std::string_view user_text,
                              std::string_view memory_text) const;

    const GatewayConfig& config() const { return config_; }

private:
    std::string redact(std::string s) const;

    GatewayConfig config_;
    std::shared_ptr<TranscriptSink> transcript_;
    Sleeper sleeper_;
};

/// Free-function form of ChatGateway::chat_complete.
std::string chat_complete(const GatewayConfig& config, std::string_view system_text,
                          std::string_view user_text, std::string_view memory_text,
                          std::shared_ptr<TranscriptSink> transcript = nullptr);

/// Request body sent for one decision.
nlohmann::json build_chat_request(const GatewayConfig& config, std::string_view system_text,
                                  std::string_view user_text, std::string_view memory_text);

/// Extracts choices[0].message.content; throws GatewayError(malformed_response).
std::string extract_content(std::string_view body);

class RemoteBackend final : public DecisionBackend {
public:
    explicit RemoteBackend(std::shared_ptr<ChatGateway> gateway) : gateway_(std::move(gateway)) {}

    std::string decide(const DecisionRequest& request) override {
        return gateway_->chat_complete(request.prompt.system_text, request.prompt.user_text,
                                       request.prompt.memory_text);
    }
    bool deterministic() const override { return false; }
    std::string_view name() const override { return "remote"; }

private:
    std::shared_ptr<ChatGateway> gateway_;
};

}  // namespace pcsim
