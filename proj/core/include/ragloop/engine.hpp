#pragma once

#include "ragloop/gateway.hpp"
#include "ragloop/prompts.hpp"
#include "ragloop/stages.hpp"
#include "ragloop/vector_store.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ragloop {

struct EngineConfig {
    int max_iterations = 5;
    int n_questions = 5;
    int k = 5;
    int parallelism = 0; // 0 -> n_questions
    bool final_refine = false;
    double temperature = 0.0;
    int max_tokens = 2000;
    PriceTable prices;
    std::uint64_t seed = 42;

    int effective_parallelism() const { return parallelism > 0 ? parallelism : n_questions; }
    void validate() const;
};

/// Mutable state carried across loop passes. iteration moves in steps of
/// exactly 1; satisfied can only be set by a satisfied last_verdict.
struct LoopState {
    int iteration = 0;
    Notes notes;
    QueryLog query_log;
    std::optional<Verdict> last_verdict;
    bool satisfied = false;
};

enum class EventKind { SeedRetrieval, LlmCall, NotePhase, RefineMetric };

std::string_view to_string(EventKind kind);

struct TranscriptEvent {
    EventKind kind = EventKind::LlmCall;
    int iteration = 0;

    // LlmCall
    std::optional<UsageRecord> usage;

    // SeedRetrieval: (chunk_id, score) in rank order
    std::vector<std::pair<std::string, double>> seed_hits;

    // NotePhase
    std::chrono::microseconds phase_wall_clock{0};
    int task_count = 0;

    // RefineMetric
    double compression_ratio = 0.0;

    nlohmann::json to_json(bool include_timing) const;
};

/// Full transcript of one loop run. The number of LlmCall events always
/// equals the ledger record count: no hidden calls.
struct RunReport {
    std::string user_query;
    std::string final_hypothesis;
    std::string final_notes;
    std::string final_feedback; // last verdict's feedback (capped exits keep it)
    bool satisfied = false;
    int iterations_used = 0;
    std::vector<std::string> query_log;

    std::vector<UsageRecord> ledger_records;
    PriceTable prices;
    LedgerTotals totals;

    std::chrono::microseconds total_wall_clock{0};
    std::vector<TranscriptEvent> transcript;

    /// include_timing=false omits every wall-clock field; two runs of the
    /// same script then compare byte-identical.
    nlohmann::json to_json(bool include_timing = true) const;
};

struct BenchRow {
    std::string method; // "baseline" | "proposed"
    bool satisfied = false;
    Money cost;
    std::chrono::microseconds delay{0};
};

/// Head-to-head comparison shaped like the reference table: Method,
/// Information Need, Cost ($), Delay (seconds). Reductions are fractions
/// of the baseline: (baseline - proposed) / baseline.
struct BenchReport {
    std::string user_query;
    BenchRow baseline;
    BenchRow proposed;
    double relative_cost_reduction = 0.0;
    double relative_delay_reduction = 0.0;

    nlohmann::json to_json(bool include_timing = true) const;
};

/// Computes both reduction fields from the rows (zero baseline -> zero).
BenchReport make_bench_report(std::string user_query, BenchRow baseline, BenchRow proposed);

/// Aligned plain-text rendering of the comparison table plus the two
/// reduction lines.
std::string render_bench_table(const BenchReport& report);

struct BenchOutcome {
    BenchReport report;
    RunReport baseline_run;
    RunReport proposed_run;
};

/// Loop controller. run_loop is the proposed method (seed retrieval,
/// concurrent brainstorming, hybrid hypothesize-satisfy); run_baseline is
/// the sequential topology: no seed retrieval, note extraction strictly one
/// at a time, hypothesize and satisfy as two separate calls.
class Engine {
public:
    Engine(const VectorStore& store,
           const Embedder& embedder,
           const PromptLibrary& prompts,
           EngineConfig config);

    RunReport run_loop(const std::string& user_query, ChatProvider& provider) const;
    RunReport run_baseline(const std::string& user_query, ChatProvider& provider) const;

    const EngineConfig& config() const { return config_; }

private:
    enum class Mode { Proposed, Baseline };

    RunReport run(const std::string& user_query, ChatProvider& provider, Mode mode) const;

    const VectorStore& store_;
    const Embedder& embedder_;
    const PromptLibrary& prompts_;
    EngineConfig config_;
};

/// Runs the baseline arm, then the proposed arm, and assembles the
/// comparison. A failing arm is reported as an Error naming the arm.
BenchOutcome run_bench(const Engine& engine,
                       const std::string& user_query,
                       ChatProvider& baseline_provider,
                       ChatProvider& proposed_provider);

} // namespace ragloop
