#include "pcsim/gateway.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "httplib.h"

namespace pcsim {
namespace {

struct Endpoint {
    std::string origin;  // scheme://host[:port]
    std::string path;    // prefix + /chat/completions
};

Endpoint split_url(const std::string& base_url) {
    const auto scheme_end = base_url.find("://");
    if (scheme_end == std::string::npos)
        throw GatewayError(GatewayError::Kind::transport, "base_url must include a scheme: " + base_url);
    const auto path_start = base_url.find('/', scheme_end + 3);
    Endpoint ep;
    ep.origin = base_url.substr(0, path_start);
    std::string prefix = path_start == std::string::npos ? "" : base_url.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    ep.path = prefix + "/chat/completions";
    return ep;
}

void set_timeout(httplib::Client& cli, double seconds) {
    const auto us = std::chrono::microseconds(static_cast<long long>(std::llround(seconds * 1e6)));
    const auto sec = static_cast<time_t>(us.count() / 1000000);
    const auto usec = static_cast<time_t>(us.count() % 1000000);
    cli.set_connection_timeout(sec, usec);
    cli.set_read_timeout(sec, usec);
    cli.set_write_timeout(sec, usec);
}

bool retryable_status(int status) { return status == 429 || status >= 500; }

}  // namespace

std::string GatewayConfig::api_key_from_env() {
    const char* v = std::getenv(kApiKeyEnv);
    return v ? std::string(v) : std::string();
}

nlohmann::json GatewayConfig::to_json() const {
    return {{"base_url", base_url},     {"model", model_name},         {"temperature", temperature},
            {"max_tokens", max_tokens}, {"timeout_s", timeout_s},      {"max_retries", max_retries},
            {"backoff_base_s", backoff_base_s}, {"backoff_factor", backoff_factor}};
}

nlohmann::json build_chat_request(const GatewayConfig& config, std::string_view system_text,
                                  std::string_view user_text, std::string_view memory_text) {
    std::string user(user_text);
    if (!memory_text.empty()) {
        user += "\n\n";
        user += memory_text;
    }
    return {{"model", config.model_name},
            {"messages",
             nlohmann::json::array({{{"role", "system"}, {"content", std::string(system_text)}},
                                    {{"role", "user"}, {"content", user}}})},
            {"temperature", config.temperature},
            {"max_tokens", config.max_tokens}};
}

std::string extract_content(std::string_view body) {
    const auto doc = nlohmann::json::parse(body, nullptr, false);
    if (doc.is_discarded()) throw GatewayError(GatewayError::Kind::malformed_response, "response is not JSON");
    try {
        const auto& content = doc.at("choices").at(0).at("message").at("content");
        if (!content.is_string())
            throw GatewayError(GatewayError::Kind::malformed_response, "message content is not a string");
        return content.get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw GatewayError(GatewayError::Kind::malformed_response,
                           std::string("missing choices[0].message.content: ") + e.what());
    }
}

ChatGateway::ChatGateway(GatewayConfig config, std::shared_ptr<TranscriptSink> transcript)
    : config_(std::move(config)), transcript_(std::move(transcript)) {
    if (config_.max_retries < 0) throw Error("max_retries must be nonnegative");
    if (!(config_.timeout_s > 0.0)) throw Error("timeout must be positive");
    sleeper_ = [](double s) { std::this_thread::sleep_for(std::chrono::duration<double>(s)); };
}

std::string ChatGateway::redact(std::string s) const {
    if (config_.api_key.empty()) return s;
    for (auto pos = s.find(config_.api_key); pos != std::string::npos; pos = s.find(config_.api_key, pos))
        s.replace(pos, config_.api_key.size(), "[REDACTED]");
    return s;
}

std::string ChatGateway::chat_complete(std::string_view system_text, std::string_view user_text,
                                       std::string_view memory_text) const {
    const Endpoint ep = split_url(config_.base_url);
    const nlohmann::json request = build_chat_request(config_, system_text, user_text, memory_text);
    const std::string body = request.dump();

    httplib::Client cli(ep.origin);
    set_timeout(cli, config_.timeout_s);
    if (!config_.api_key.empty()) cli.set_bearer_token_auth(config_.api_key);

    double backoff = config_.backoff_base_s;
    for (int attempt = 1;; ++attempt) {
        const auto t0 = std::chrono::steady_clock::now();
        auto res = cli.Post(ep.path, body, "application/json");
        const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        nlohmann::json record{{"attempt", attempt},
                              {"url", config_.base_url + "/chat/completions"},
                              {"request", request},
                              {"latency_ms", elapsed * 1e3}};
        std::optional<GatewayError> failure;
        std::string content;
        if (!res) {
            const auto err = res.error();
            const bool timed_out = err == httplib::Error::ConnectionTimeout ||
                                   ((err == httplib::Error::Read || err == httplib::Error::Write) &&
                                    elapsed >= 0.9 * config_.timeout_s);
            failure.emplace(timed_out ? GatewayError::Kind::timeout : GatewayError::Kind::transport,
                            (timed_out ? "request timed out: " : "transport error: ") + httplib::to_string(err));
            record["error"] = failure->what();
        } else {
            record["status"] = res->status;
            record["response"] = redact(res->body);
            if (res->status < 200 || res->status >= 300) {
                failure.emplace(GatewayError::Kind::http_status, "HTTP status " + std::to_string(res->status),
                                res->status);
                record["error"] = failure->what();
            } else {
                try {
                    content = extract_content(res->body);
                } catch (const GatewayError& e) {
                    record["error"] = e.what();
                    if (transcript_) transcript_->append(record);
                    throw;
                }
            }
        }
        if (transcript_) transcript_->append(record);
        if (!failure) return content;

        const bool retryable = failure->kind == GatewayError::Kind::timeout ||
                               failure->kind == GatewayError::Kind::transport ||
                               (failure->kind == GatewayError::Kind::http_status && retryable_status(failure->status));
        if (!retryable || attempt > config_.max_retries) throw *failure;
        sleeper_(backoff);
        backoff *= config_.backoff_factor;
    }
}

std::string chat_complete(const GatewayConfig& config, std::string_view system_text, std::string_view user_text,
                          std::string_view memory_text, std::shared_ptr<TranscriptSink> transcript) {
    return ChatGateway(config, std::move(transcript)).chat_complete(system_text, user_text, memory_text);
}

}  // namespace pcsim
