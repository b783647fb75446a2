#include "http_transport.hpp"

#include <httplib.h>

#include <thread>

namespace ragloop::detail {

namespace {

bool retryable_status(int status) {
    return status == 408 || status == 429 || (status >= 500 && status < 600);
}

std::string snippet(const std::string& body) {
    constexpr std::size_t kMax = 200;
    if (body.size() <= kMax) {
        return body;
    }
    return body.substr(0, kMax) + "...";
}

} // namespace

std::string post_json_with_retry(const HttpPostSpec& spec) {
    std::string last_failure = "no attempt made";

    for (int attempt = 0; attempt < spec.attempts; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(spec.backoff_base * (1 << (attempt - 1)));
        }

        // One client per attempt: keeps concurrent in-flight requests
        // independent of each other.
        httplib::Client client(spec.base_url);
        client.set_connection_timeout(spec.timeout);
        client.set_read_timeout(spec.timeout);
        client.set_write_timeout(spec.timeout);

        httplib::Headers headers;
        if (!spec.api_key.empty()) {
            headers.emplace("Authorization", "Bearer " + spec.api_key);
        }

        auto res = client.Post(spec.path, headers, spec.body, "application/json");
        if (!res) {
            last_failure = "connection error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status >= 200 && res->status < 300) {
            return res->body;
        }
        if (retryable_status(res->status)) {
            last_failure = "HTTP " + std::to_string(res->status) + ": " + snippet(res->body);
            continue;
        }
        throw TransportError("HTTP " + std::to_string(res->status) + " from " + spec.base_url +
                                 spec.path + ": " + snippet(res->body),
                             attempt + 1);
    }

    throw TransportError("POST " + spec.base_url + spec.path + " failed after " +
                             std::to_string(spec.attempts) + " attempts; last: " + last_failure,
                         spec.attempts);
}

} // namespace ragloop::detail
