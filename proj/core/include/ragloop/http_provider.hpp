#pragma once

#include "ragloop/gateway.hpp"

#include <chrono>
#include <string>

namespace ragloop {

struct HttpProviderOptions {
    std::string base_url = "https://api.openai.com"; // no trailing /v1
    std::string model;
    std::string api_key; // resolved from ENGINE_API_KEY by the caller
    int transport_attempts = 3;
    std::chrono::milliseconds backoff_base{500};
    std::chrono::seconds timeout{120};
};

/// OpenAI-compatible chat-completions client. Each call uses its own
/// connection, so any number of requests may be in flight at once.
/// Transient failures (connect errors, 408/429/5xx) are retried with
/// exponential backoff (backoff_base * 2^attempt) up to transport_attempts
/// total tries, then surface as TransportError.
class HttpProvider final : public ChatProvider {
public:
    explicit HttpProvider(HttpProviderOptions options);

    ChatResult complete(const ChatRequest& request) override;

    const HttpProviderOptions& options() const { return options_; }

private:
    HttpProviderOptions options_;
};

} // namespace ragloop
