#pragma once

// Internal shared transport for the OpenAI-compatible endpoints. Not
// installed; both the chat provider and the remote embedder post through
// here so they share one retry policy.

#include "ragloop/error.hpp"

#include <chrono>
#include <string>

namespace ragloop::detail {

struct HttpPostSpec {
    std::string base_url; // scheme://host[:port], no trailing path
    std::string path;     // "/v1/chat/completions", "/v1/embeddings"
    std::string api_key;  // empty -> no Authorization header
    std::string body;     // JSON payload
    int attempts = 3;
    std::chrono::milliseconds backoff_base{500};
    std::chrono::seconds timeout{120};
};

/// POSTs `body` as application/json. Connection failures and 408/429/5xx
/// statuses are retried with exponential backoff (backoff_base * 2^i) up to
/// `attempts` tries; other non-2xx statuses fail fast. Throws
/// TransportError; returns the response body on success.
std::string post_json_with_retry(const HttpPostSpec& spec);

} // namespace ragloop::detail
