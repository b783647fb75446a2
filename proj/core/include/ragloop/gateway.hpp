#pragma once

#include "ragloop/error.hpp"
#include "ragloop/money.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <map>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

namespace ragloop {

/// Which stage of the loop issued a call. Wire names match the report and
/// mock-script formats.
enum class RoleTag {
    BrainstormQuestions,
    BrainstormNotes,
    HypSat,
    Refine,
    BaselineHypothesize,
    BaselineSatisfy,
};

std::string_view to_string(RoleTag tag);
RoleTag role_tag_from_string(std::string_view name);

struct ChatRequest {
    RoleTag role_tag = RoleTag::HypSat;
    std::string system_prompt;
    std::string user_prompt;
    double temperature = 0.0;
    int max_tokens = 2000;
    bool json_mode = true;
    int iteration = 0;
    int slot = 0; // fan-out lane within one (role_tag, iteration)
};

/// Raw provider output for one completed request.
struct ChatResult {
    std::string text;
    long prompt_tokens = 0;
    long completion_tokens = 0;
};

class ChatProvider {
public:
    virtual ~ChatProvider() = default;

    /// Must accept concurrent in-flight calls; the brainstorm fan-out
    /// issues up to `parallelism` at once.
    virtual ChatResult complete(const ChatRequest& request) = 0;
};

struct UsageRecord {
    RoleTag role_tag = RoleTag::HypSat;
    long prompt_tokens = 0;
    long completion_tokens = 0;
    std::chrono::microseconds wall_clock{0};
    int retries = 0; // corrective re-issues after malformed JSON
    int iteration = 0;
};

/// Prices per 1000 tokens. Limited to 6 decimal places so the per-token
/// price is an exact integer number of nanodollars.
struct PriceTable {
    Money prompt_per_1k;
    Money completion_per_1k;

    static PriceTable parse(std::string_view prompt_price, std::string_view completion_price);
};

struct RoleBreakdown {
    long calls = 0;
    long prompt_tokens = 0;
    long completion_tokens = 0;
    Money cost;
};

struct LedgerTotals {
    Money total_cost;
    long total_prompt_tokens = 0;
    long total_completion_tokens = 0;
    std::map<std::string, RoleBreakdown> per_role;
};

/// Append-only usage log; thread-safe appends, exact integer cost math.
class CostLedger {
public:
    explicit CostLedger(PriceTable prices);

    void append(const UsageRecord& record);
    std::vector<UsageRecord> records() const;
    std::size_t size() const;
    const PriceTable& prices() const { return prices_; }

    Money record_cost(const UsageRecord& record) const;
    LedgerTotals totals() const;

private:
    PriceTable prices_;
    mutable std::mutex mutex_;
    std::vector<UsageRecord> records_;
};

/// Model output was unusable after the retry budget: malformed JSON, schema
/// violations, empty completions. Carries the raw text and the usage that
/// was spent producing it.
class ProtocolError : public Error {
public:
    ProtocolError(const std::string& msg, std::string raw, UsageRecord spent)
        : Error(msg), raw_text(std::move(raw)), usage(spent) {}

    std::string raw_text;
    UsageRecord usage;
};

struct ChatJsonResult {
    nlohmann::json value;
    UsageRecord usage;
};

struct ChatTextResult {
    std::string text;
    UsageRecord usage;
};

/// Corrective re-issues after a malformed JSON body, on top of the
/// provider's own transport retries.
inline constexpr int kMaxJsonRetries = 2;

/// Issues `request` (json_mode required) and parses the reply. A body that
/// fails to parse is re-issued with an appended corrective instruction up
/// to kMaxJsonRetries times; usage aggregates every attempt and `retries`
/// counts the re-issues. Exhaustion throws ProtocolError with the last raw
/// body.
ChatJsonResult chat_json(ChatProvider& provider, const ChatRequest& request);

/// Plain-text variant (json_mode must be false). An empty completion is a
/// ProtocolError.
ChatTextResult chat_text(ChatProvider& provider, const ChatRequest& request);

} // namespace ragloop
