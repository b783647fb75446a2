#include "ragloop/engine.hpp"

#include "ragloop/error.hpp"

#include <chrono>
#include <utility>

namespace ragloop {

void EngineConfig::validate() const {
    if (max_iterations < 1) {
        throw ConfigError("max_iterations must be >= 1");
    }
    if (n_questions < 1) {
        throw ConfigError("n_questions must be >= 1");
    }
    if (k < 1) {
        throw ConfigError("k must be >= 1");
    }
    if (parallelism < 0) {
        throw ConfigError("parallelism cannot be negative");
    }
    if (max_tokens < 1) {
        throw ConfigError("max_tokens must be >= 1");
    }
    if (temperature < 0.0) {
        throw ConfigError("temperature cannot be negative");
    }
}

Engine::Engine(const VectorStore& store, const Embedder& embedder, const PromptLibrary& prompts,
               EngineConfig config)
    : store_(store), embedder_(embedder), prompts_(prompts), config_(std::move(config)) {
    config_.validate();
}

namespace {

TranscriptEvent llm_event(const UsageRecord& usage) {
    TranscriptEvent event;
    event.kind = EventKind::LlmCall;
    event.iteration = usage.iteration;
    event.usage = usage;
    return event;
}

template <typename F>
auto with_iteration_context(int iteration, F&& body) {
    try {
        return body();
    } catch (const ProtocolError& e) {
        throw ProtocolError("iteration " + std::to_string(iteration) + ": " + e.what(),
                            e.raw_text, e.usage);
    } catch (const StageError& e) {
        throw StageError("iteration " + std::to_string(iteration) + ": " + e.what());
    }
}

} // namespace

RunReport Engine::run_loop(const std::string& user_query, ChatProvider& provider) const {
    return run(user_query, provider, Mode::Proposed);
}

RunReport Engine::run_baseline(const std::string& user_query, ChatProvider& provider) const {
    return run(user_query, provider, Mode::Baseline);
}

RunReport Engine::run(const std::string& user_query, ChatProvider& provider, Mode mode) const {
    if (user_query.empty()) {
        throw InvalidInput("user query is empty");
    }
    if (store_.empty()) {
        throw StoreError("empty store"); // fail before the first LLM call
    }

    const auto run_start = std::chrono::steady_clock::now();
    CostLedger ledger(config_.prices);
    std::vector<TranscriptEvent> transcript;
    LoopState state;
    std::string seed_block;

    // Seed retrieval: the workflow's first Retrieve -> Rerank, feeding the
    // first brainstorm prompt. The baseline arm deliberately lacks it.
    if (mode == Mode::Proposed) {
        Embedding query_emb = embedder_.embed(user_query);
        auto hits = store_.search(query_emb, static_cast<std::size_t>(4) * config_.k);
        std::size_t k_eff = std::min<std::size_t>(config_.k, hits.size());
        Embedding context = embedder_.embed(composite_context_text(user_query, state.notes));
        auto reranked = store_.rerank(hits, context, k_eff);
        seed_block = format_chunk_context(reranked, kChunkContextBudget);

        TranscriptEvent event;
        event.kind = EventKind::SeedRetrieval;
        event.iteration = 0;
        for (const auto& hit : reranked) {
            event.seed_hits.emplace_back(hit.chunk.chunk_id, hit.score);
        }
        transcript.push_back(std::move(event));
    }

    while (true) {
        state.iteration += 1;
        const int iteration = state.iteration;

        BrainstormRequest brainstorm;
        brainstorm.user_query = user_query;
        brainstorm.notes = state.notes;
        brainstorm.query_log = &state.query_log;
        brainstorm.store = &store_;
        brainstorm.embedder = &embedder_;
        brainstorm.prompts = &prompts_;
        brainstorm.initial_context = (mode == Mode::Proposed && iteration == 1) ? seed_block : "";
        brainstorm.n_questions = config_.n_questions;
        brainstorm.k = config_.k;
        brainstorm.parallelism = mode == Mode::Proposed ? config_.effective_parallelism() : 1;
        brainstorm.temperature = config_.temperature;
        brainstorm.max_tokens = config_.max_tokens;
        brainstorm.iteration = iteration;

        BrainstormOutcome outcome = with_iteration_context(
            iteration, [&] { return brainstorm_concurrent(brainstorm, provider, ledger); });

        for (const auto& usage : outcome.usage) {
            transcript.push_back(llm_event(usage));
        }
        TranscriptEvent phase;
        phase.kind = EventKind::NotePhase;
        phase.iteration = iteration;
        phase.phase_wall_clock = outcome.note_phase_wall_clock;
        phase.task_count = outcome.note_tasks;
        transcript.push_back(phase);

        state.notes = outcome.notes;
        for (const auto& query : outcome.new_queries) {
            state.query_log.add(query);
        }

        HypSatRequest hyp_sat;
        hyp_sat.user_query = user_query;
        hyp_sat.notes = state.notes;
        hyp_sat.query_log = &state.query_log;
        hyp_sat.prompts = &prompts_;
        hyp_sat.temperature = config_.temperature;
        hyp_sat.max_tokens = config_.max_tokens;
        hyp_sat.iteration = iteration;

        if (mode == Mode::Proposed) {
            auto [v, usage] = with_iteration_context(
                iteration, [&] { return hypothesize_satisfy(hyp_sat, provider, ledger); });
            transcript.push_back(llm_event(usage));
            state.last_verdict = std::move(v);
        } else {
            auto [v, usages] = with_iteration_context(iteration, [&] {
                return baseline_hypothesize_satisfy(hyp_sat, provider, ledger);
            });
            for (const auto& usage : usages) {
                transcript.push_back(llm_event(usage));
            }
            state.last_verdict = std::move(v);
        }

        if (state.last_verdict->satisfied) {
            state.satisfied = true;
            break;
        }
        if (iteration >= config_.max_iterations) {
            break; // capped exit: reported, not raised; no trailing refine
        }
        if (!state.notes.empty()) {
            RefineResult refined = with_iteration_context(iteration, [&] {
                return refine_notes(state.notes, user_query, prompts_, provider, ledger,
                                    config_.temperature, config_.max_tokens, iteration);
            });
            state.notes = refined.notes;
            transcript.push_back(llm_event(refined.usage));

            TranscriptEvent metric;
            metric.kind = EventKind::RefineMetric;
            metric.iteration = iteration;
            metric.compression_ratio = refined.compression_ratio;
            transcript.push_back(metric);
        }
    }

    std::string hypothesis = state.last_verdict ? state.last_verdict->hypothesis : "";
    if (state.satisfied && config_.final_refine && !hypothesis.empty()) {
        RefineResult refined =
            refine_notes(Notes{hypothesis}, user_query, prompts_, provider, ledger,
                         config_.temperature, config_.max_tokens, state.iteration);
        hypothesis = refined.notes.text;
        transcript.push_back(llm_event(refined.usage));

        TranscriptEvent metric;
        metric.kind = EventKind::RefineMetric;
        metric.iteration = state.iteration;
        metric.compression_ratio = refined.compression_ratio;
        transcript.push_back(metric);
    }

    RunReport report;
    report.user_query = user_query;
    report.final_hypothesis = hypothesis;
    report.final_notes = state.notes.text;
    report.final_feedback = state.last_verdict ? state.last_verdict->feedback : "";
    report.satisfied = state.satisfied;
    report.iterations_used = state.iteration;
    report.query_log = state.query_log.entries();
    report.ledger_records = ledger.records();
    report.prices = ledger.prices();
    report.totals = ledger.totals();
    report.total_wall_clock = std::chrono::duration_cast<std::chrono::microseconds>(
        std::chrono::steady_clock::now() - run_start);
    report.transcript = std::move(transcript);
    return report;
}

BenchOutcome run_bench(const Engine& engine, const std::string& user_query,
                       ChatProvider& baseline_provider, ChatProvider& proposed_provider) {
    BenchOutcome outcome;
    try {
        outcome.baseline_run = engine.run_baseline(user_query, baseline_provider);
    } catch (const std::exception& e) {
        throw Error(std::string("bench: baseline arm failed: ") + e.what());
    }
    try {
        outcome.proposed_run = engine.run_loop(user_query, proposed_provider);
    } catch (const std::exception& e) {
        throw Error(std::string("bench: proposed arm failed: ") + e.what());
    }

    BenchRow baseline{"baseline", outcome.baseline_run.satisfied,
                      outcome.baseline_run.totals.total_cost,
                      outcome.baseline_run.total_wall_clock};
    BenchRow proposed{"proposed", outcome.proposed_run.satisfied,
                      outcome.proposed_run.totals.total_cost,
                      outcome.proposed_run.total_wall_clock};
    outcome.report = make_bench_report(user_query, std::move(baseline), std::move(proposed));
    return outcome;
}

} // namespace ragloop
