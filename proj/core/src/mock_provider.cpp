#include "ragloop/mock_provider.hpp"

#include "ragloop/error.hpp"

#include <fstream>
#include <thread>

namespace ragloop {

using nlohmann::json;

MockScript MockScript::from_json(const json& j) {
    if (!j.is_object() || !j.contains("steps") || !j["steps"].is_array()) {
        throw ConfigError("mock script must be an object with a 'steps' array");
    }
    MockScript script;
    for (const auto& item : j["steps"]) {
        MockStep step;
        try {
            step.role_tag = role_tag_from_string(item.at("role_tag").get<std::string>());
            step.iteration = item.at("iteration").get<int>();
            step.slot = item.value("slot", 0);
            step.response = item.at("response").get<std::string>();
            step.latency = std::chrono::milliseconds(item.value("latency_ms", 0));
            step.prompt_tokens = item.value("prompt_tokens", 0L);
            step.completion_tokens = item.value("completion_tokens", 0L);
        } catch (const json::exception& e) {
            throw ConfigError(std::string("bad mock script step: ") + e.what());
        }
        script.steps.push_back(std::move(step));
    }
    return script;
}

MockScript MockScript::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open mock script: " + path);
    }
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) {
        throw ConfigError("mock script is not valid JSON: " + path);
    }
    return from_json(j);
}

json MockScript::to_json() const {
    json out = json::array();
    for (const auto& step : steps) {
        out.push_back(json{{"role_tag", std::string(to_string(step.role_tag))},
                           {"iteration", step.iteration},
                           {"slot", step.slot},
                           {"response", step.response},
                           {"latency_ms", step.latency.count()},
                           {"prompt_tokens", step.prompt_tokens},
                           {"completion_tokens", step.completion_tokens}});
    }
    return json{{"steps", out}};
}

MockProvider::MockProvider(MockScript script)
    : script_(std::move(script)), consumed_(script_.steps.size(), false) {}

ChatResult MockProvider::complete(const ChatRequest& request) {
    const MockStep* step = nullptr;
    {
        std::lock_guard lock(mutex_);
        for (std::size_t i = 0; i < script_.steps.size(); ++i) {
            const auto& candidate = script_.steps[i];
            if (!consumed_[i] && candidate.role_tag == request.role_tag &&
                candidate.iteration == request.iteration && candidate.slot == request.slot) {
                consumed_[i] = true;
                step = &candidate;
                break;
            }
        }
    }
    if (step == nullptr) {
        throw ScriptError("mock script has no unconsumed step for (role " +
                          std::string(to_string(request.role_tag)) + ", iteration " +
                          std::to_string(request.iteration) + ", slot " +
                          std::to_string(request.slot) + ")");
    }

    // Sleep outside the lock: concurrent calls must elapse concurrently.
    if (step->latency.count() > 0) {
        std::this_thread::sleep_for(step->latency);
    }
    return ChatResult{step->response, step->prompt_tokens, step->completion_tokens};
}

bool MockProvider::fully_consumed() const {
    std::lock_guard lock(mutex_);
    for (bool used : consumed_) {
        if (!used) {
            return false;
        }
    }
    return true;
}

std::size_t MockProvider::remaining() const {
    std::lock_guard lock(mutex_);
    std::size_t count = 0;
    for (bool used : consumed_) {
        if (!used) {
            ++count;
        }
    }
    return count;
}

} // namespace ragloop
