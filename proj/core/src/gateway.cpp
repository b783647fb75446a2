#include "ragloop/gateway.hpp"

#include <array>
#include <chrono>

namespace ragloop {

using nlohmann::json;

namespace {

struct RoleName {
    RoleTag tag;
    std::string_view name;
};

constexpr std::array<RoleName, 6> kRoleNames{{
    {RoleTag::BrainstormQuestions, "brainstorm-questions"},
    {RoleTag::BrainstormNotes, "brainstorm-notes"},
    {RoleTag::HypSat, "hyp-sat"},
    {RoleTag::Refine, "refine"},
    {RoleTag::BaselineHypothesize, "baseline-hypothesize"},
    {RoleTag::BaselineSatisfy, "baseline-satisfy"},
}};

constexpr std::string_view kCorrectiveSuffix =
    "\n\nYour previous reply was not valid JSON. Respond again with a single "
    "valid JSON object and nothing else.";

} // namespace

std::string_view to_string(RoleTag tag) {
    for (const auto& entry : kRoleNames) {
        if (entry.tag == tag) {
            return entry.name;
        }
    }
    return "unknown";
}

RoleTag role_tag_from_string(std::string_view name) {
    for (const auto& entry : kRoleNames) {
        if (entry.name == name) {
            return entry.tag;
        }
    }
    throw ConfigError("unknown role_tag: '" + std::string(name) + "'");
}

PriceTable PriceTable::parse(std::string_view prompt_price, std::string_view completion_price) {
    PriceTable table;
    table.prompt_per_1k = Money::parse(prompt_price);
    table.completion_per_1k = Money::parse(completion_price);
    for (const Money& price : {table.prompt_per_1k, table.completion_per_1k}) {
        if (price.nanos() < 0) {
            throw ConfigError("token price cannot be negative");
        }
        if (price.nanos() % 1000 != 0) {
            throw ConfigError("token price '" + price.str() +
                              "' needs at most 6 decimal places per 1k tokens");
        }
    }
    return table;
}

CostLedger::CostLedger(PriceTable prices) : prices_(prices) {}

void CostLedger::append(const UsageRecord& record) {
    std::lock_guard lock(mutex_);
    records_.push_back(record);
}

std::vector<UsageRecord> CostLedger::records() const {
    std::lock_guard lock(mutex_);
    return records_;
}

std::size_t CostLedger::size() const {
    std::lock_guard lock(mutex_);
    return records_.size();
}

Money CostLedger::record_cost(const UsageRecord& record) const {
    // per-token prices are exact integers (PriceTable::parse enforces it)
    std::int64_t per_prompt_token = prices_.prompt_per_1k.nanos() / 1000;
    std::int64_t per_completion_token = prices_.completion_per_1k.nanos() / 1000;
    return Money::from_nanos(record.prompt_tokens * per_prompt_token +
                             record.completion_tokens * per_completion_token);
}

LedgerTotals CostLedger::totals() const {
    std::lock_guard lock(mutex_);
    LedgerTotals t;
    for (const auto& record : records_) {
        Money cost = record_cost(record);
        t.total_cost += cost;
        t.total_prompt_tokens += record.prompt_tokens;
        t.total_completion_tokens += record.completion_tokens;

        auto& role = t.per_role[std::string(to_string(record.role_tag))];
        role.calls += 1;
        role.prompt_tokens += record.prompt_tokens;
        role.completion_tokens += record.completion_tokens;
        role.cost += cost;
    }
    return t;
}

namespace {

using Clock = std::chrono::steady_clock;

std::chrono::microseconds since(Clock::time_point start) {
    return std::chrono::duration_cast<std::chrono::microseconds>(Clock::now() - start);
}

} // namespace

ChatJsonResult chat_json(ChatProvider& provider, const ChatRequest& request) {
    if (!request.json_mode) {
        throw ConfigError("chat_json requires json_mode");
    }

    UsageRecord usage;
    usage.role_tag = request.role_tag;
    usage.iteration = request.iteration;

    const auto start = Clock::now();
    ChatRequest attempt_request = request;
    std::string last_text;

    for (int attempt = 0; attempt <= kMaxJsonRetries; ++attempt) {
        ChatResult result = provider.complete(attempt_request);
        usage.prompt_tokens += result.prompt_tokens;
        usage.completion_tokens += result.completion_tokens;
        usage.retries = attempt;
        last_text = result.text;

        json parsed = json::parse(result.text, nullptr, false);
        if (!parsed.is_discarded()) {
            usage.wall_clock = since(start);
            return ChatJsonResult{std::move(parsed), usage};
        }
        attempt_request.user_prompt = request.user_prompt + std::string(kCorrectiveSuffix);
    }

    usage.wall_clock = since(start);
    throw ProtocolError("model returned malformed JSON after " + std::to_string(kMaxJsonRetries) +
                            " retries (role " + std::string(to_string(request.role_tag)) + ")",
                        last_text, usage);
}

ChatTextResult chat_text(ChatProvider& provider, const ChatRequest& request) {
    if (request.json_mode) {
        throw ConfigError("chat_text requires json_mode off");
    }

    UsageRecord usage;
    usage.role_tag = request.role_tag;
    usage.iteration = request.iteration;

    const auto start = Clock::now();
    ChatResult result = provider.complete(request);
    usage.prompt_tokens = result.prompt_tokens;
    usage.completion_tokens = result.completion_tokens;
    usage.wall_clock = since(start);

    if (result.text.empty()) {
        throw ProtocolError("empty completion (role " + std::string(to_string(request.role_tag)) +
                                ")",
                            result.text, usage);
    }
    return ChatTextResult{result.text, usage};
}

} // namespace ragloop
