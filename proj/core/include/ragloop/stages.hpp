#pragma once

#include "ragloop/embedding.hpp"
#include "ragloop/gateway.hpp"
#include "ragloop/prompts.hpp"
#include "ragloop/vector_store.hpp"

#include <chrono>
#include <string>
#include <utility>
#include <vector>

namespace ragloop {

/// Accumulated evidence text. Grows only via the brainstorm merge and is
/// replaced wholesale by refine.
struct Notes {
    std::string text;

    std::size_t char_count() const { return text.size(); }
    bool empty() const { return text.empty(); }
};

/// lowercase, whitespace collapsed, terminal .?! stripped — the comparison
/// key for query dedup.
std::string normalize_query(std::string_view query);

/// Issued follow-up queries in proposal order. The original user query is
/// held separately and is never a member. Entries are unique under
/// normalize_query().
class QueryLog {
public:
    /// Returns false (and leaves the log unchanged) on a duplicate.
    bool add(const std::string& query);
    bool contains(std::string_view query) const;
    const std::vector<std::string>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }

private:
    std::vector<std::string> entries_;
    std::vector<std::string> normalized_;
};

/// Composite rerank context: the user query when notes are empty, else
/// query + "\n" + notes.
std::string composite_context_text(const std::string& user_query, const Notes& notes);

/// Renders reranked hits as a prompt block, keeping at most `text_budget`
/// characters of chunk text (lowest-ranked chunks truncated first).
std::string format_chunk_context(const std::vector<SearchHit>& hits, std::size_t text_budget);

inline constexpr std::size_t kChunkContextBudget = 6000;

struct BrainstormRequest {
    std::string user_query;
    Notes notes;
    const QueryLog* query_log = nullptr;
    const VectorStore* store = nullptr;
    const Embedder* embedder = nullptr;
    const PromptLibrary* prompts = nullptr;
    std::string initial_context; // seed chunk block for the questions prompt
    int n_questions = 5;
    int k = 5;
    int parallelism = 5;
    double temperature = 0.0;
    int max_tokens = 2000;
    int iteration = 1;
};

struct BrainstormOutcome {
    std::vector<std::string> new_queries; // proposal order
    Notes notes;                          // input notes + merged blocks
    std::vector<UsageRecord> usage;       // questions call first, then tasks in proposal order
    std::chrono::microseconds note_phase_wall_clock{0};
    int note_tasks = 0;
};

/// Algorithm stage 1: one json call proposes candidate queries; duplicates
/// of the user query / query log are dropped; each survivor then runs
/// embed -> search 4k -> rerank k -> note-extraction call, at most
/// `parallelism` in flight. Per-query note blocks merge in proposal order
/// (never completion order), separated by blank lines. Usage records are
/// appended to `ledger` in that same deterministic order.
BrainstormOutcome brainstorm_concurrent(const BrainstormRequest& request,
                                        ChatProvider& provider,
                                        CostLedger& ledger);

struct HypSatRequest {
    std::string user_query;
    Notes notes;
    const QueryLog* query_log = nullptr;
    const PromptLibrary* prompts = nullptr;
    double temperature = 0.0;
    int max_tokens = 2000;
    int iteration = 1;
};

/// The hybrid verdict: chain-of-thought reasoning, the current best
/// hypothesis, and the satisficing decision, from a single call.
struct Verdict {
    std::string reasoning;
    std::string hypothesis;
    bool satisfied = false;
    std::string feedback;
};

/// Algorithm stage 2: exactly one json call (role hyp-sat) returning
/// {reasoning, hypothesis, satisfied, feedback}. "satisfied" must be a
/// strict boolean; missing or ill-typed fields are protocol errors.
std::pair<Verdict, UsageRecord> hypothesize_satisfy(const HypSatRequest& request,
                                                    ChatProvider& provider,
                                                    CostLedger& ledger);

/// The sequential baseline's non-hybrid equivalent: two calls —
/// baseline-hypothesize returning {reasoning, hypothesis}, then
/// baseline-satisfy judging that hypothesis with {satisfied, feedback}.
std::pair<Verdict, std::vector<UsageRecord>> baseline_hypothesize_satisfy(
    const HypSatRequest& request, ChatProvider& provider, CostLedger& ledger);

struct RefineResult {
    Notes notes;
    UsageRecord usage;
    double compression_ratio = 0.0; // output chars / input chars
};

/// Algorithm stage 3: one text call distilling the notes into terse
/// declarative statements; the result replaces the notes wholesale.
RefineResult refine_notes(const Notes& notes,
                          const std::string& user_query,
                          const PromptLibrary& prompts,
                          ChatProvider& provider,
                          CostLedger& ledger,
                          double temperature,
                          int max_tokens,
                          int iteration);

} // namespace ragloop
