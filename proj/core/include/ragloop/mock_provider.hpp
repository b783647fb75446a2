#pragma once

#include "ragloop/gateway.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <mutex>
#include <string>
#include <vector>

namespace ragloop {

/// One scripted reply. Matched by (role_tag, iteration, slot); steps with
/// the same key are consumed in script order, which is how a
/// malformed-then-valid retry sequence is scripted.
struct MockStep {
    RoleTag role_tag = RoleTag::HypSat;
    int iteration = 0;
    int slot = 0;
    std::string response;
    std::chrono::milliseconds latency{0};
    long prompt_tokens = 0;
    long completion_tokens = 0;
};

struct MockScript {
    std::vector<MockStep> steps;

    static MockScript from_json(const nlohmann::json& j);
    static MockScript load_file(const std::string& path);
    nlohmann::json to_json() const;
};

/// Deterministic scripted provider. Simulated latency elapses outside the
/// lock, so concurrent in-flight calls sleep concurrently — the property
/// the speedup benchmark measures. A request with no unconsumed matching
/// step throws ScriptError.
class MockProvider final : public ChatProvider {
public:
    explicit MockProvider(MockScript script);

    ChatResult complete(const ChatRequest& request) override;

    bool fully_consumed() const;
    std::size_t remaining() const;

private:
    MockScript script_;
    std::vector<bool> consumed_;
    mutable std::mutex mutex_;
};

} // namespace ragloop
