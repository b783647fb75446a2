#include "ragloop/http_provider.hpp"

#include "http_transport.hpp"

#include <nlohmann/json.hpp>

namespace ragloop {

using nlohmann::json;

HttpProvider::HttpProvider(HttpProviderOptions options) : options_(std::move(options)) {
    if (options_.model.empty()) {
        throw ConfigError("http provider requires a model name");
    }
}

ChatResult HttpProvider::complete(const ChatRequest& request) {
    json body = {
        {"model", options_.model},
        {"messages",
         json::array({json{{"role", "system"}, {"content", request.system_prompt}},
                      json{{"role", "user"}, {"content", request.user_prompt}}})},
        {"temperature", request.temperature},
        {"max_tokens", request.max_tokens},
    };
    if (request.json_mode) {
        body["response_format"] = json{{"type", "json_object"}};
    }

    detail::HttpPostSpec spec;
    spec.base_url = options_.base_url;
    spec.path = "/v1/chat/completions";
    spec.api_key = options_.api_key;
    spec.body = body.dump();
    spec.attempts = options_.transport_attempts;
    spec.backoff_base = options_.backoff_base;
    spec.timeout = options_.timeout;

    std::string response = detail::post_json_with_retry(spec);

    json parsed = json::parse(response, nullptr, false);
    if (parsed.is_discarded() || !parsed.contains("choices") || !parsed["choices"].is_array() ||
        parsed["choices"].empty()) {
        throw TransportError("malformed chat-completions response from " + options_.base_url, 1);
    }

    ChatResult result;
    try {
        result.text = parsed["choices"][0].at("message").at("content").get<std::string>();
    } catch (const json::exception&) {
        throw TransportError("chat-completions response has no message content", 1);
    }
    if (parsed.contains("usage") && parsed["usage"].is_object()) {
        result.prompt_tokens = parsed["usage"].value("prompt_tokens", 0L);
        result.completion_tokens = parsed["usage"].value("completion_tokens", 0L);
    }
    return result;
}

} // namespace ragloop
