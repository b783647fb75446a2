// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// criterion fails. Criteria run against the mock provider and seeded
// fixtures only; nothing here touches the network.

#include "ragloop/engine.hpp"
#include "ragloop/error.hpp"
#include "ragloop/mock_provider.hpp"

#include "test_util.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace ragloop;
using testutil::ScriptBuilder;

namespace {

struct CheckFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool condition, const std::string& message) {
    if (!condition) {
        throw CheckFailure(message);
    }
}

struct Fixture {
    LocalHashEmbedder embedder{256, 42};
    VectorStore store;
    PromptLibrary prompts = PromptLibrary::builtin();

    Fixture() : store(testutil::make_corpus_store(12, embedder)) {}

    EngineConfig config(int n_questions, int max_iterations = 5) const {
        EngineConfig config;
        config.max_iterations = max_iterations;
        config.n_questions = n_questions;
        config.k = 2;
        config.prices = PriceTable::parse("0.001", "0.002");
        return config;
    }
};

long count_role(const RunReport& report, RoleTag role) {
    return std::count_if(report.ledger_records.begin(), report.ledger_records.end(),
                         [role](const UsageRecord& r) { return r.role_tag == role; });
}

std::chrono::microseconds note_phase_of(const RunReport& report, int iteration) {
    for (const auto& event : report.transcript) {
        if (event.kind == EventKind::NotePhase && event.iteration == iteration) {
            return event.phase_wall_clock;
        }
    }
    throw CheckFailure("no note_phase event for iteration " + std::to_string(iteration));
}

Money role_cost_at_iteration(const RunReport& report, const CostLedger& pricing,
                             std::initializer_list<RoleTag> roles, int iteration) {
    Money total;
    for (const auto& record : report.ledger_records) {
        if (record.iteration != iteration) {
            continue;
        }
        for (RoleTag role : roles) {
            if (record.role_tag == role) {
                total += pricing.record_cost(record);
            }
        }
    }
    return total;
}

// ---- criterion bodies -------------------------------------------------------

/// Matched scripts: 5 note tasks at 200 ms, every other call 100 ms,
/// satisfied at iteration 1. The concurrent arm's note phase must beat the
/// sequential one by construction, and the whole-run delay reduction must
/// clear 40%.
void criterion_concurrency_speedup() {
    const auto started = std::chrono::steady_clock::now();

    Fixture fx;
    testutil::RunScriptSpec spec;
    spec.iterations = 1;
    spec.n_questions = 5;
    spec.questions_latency_ms = 100;
    spec.notes_latency_ms = 200;
    spec.verdict_latency_ms = 100;
    spec.include_proposed = true;
    spec.include_baseline = true;

    MockProvider baseline_provider(testutil::build_run_script(spec));
    MockProvider proposed_provider(testutil::build_run_script(spec));
    Engine engine(fx.store, fx.embedder, fx.prompts, fx.config(5));

    auto outcome = run_bench(engine, "acceptance query", baseline_provider, proposed_provider);

    auto proposed_phase = note_phase_of(outcome.proposed_run, 1);
    auto baseline_phase = note_phase_of(outcome.baseline_run, 1);
    require(proposed_phase < std::chrono::milliseconds(450),
            "proposed note phase took " + std::to_string(proposed_phase.count() / 1000) +
                " ms, expected < 450 ms");
    require(baseline_phase >= std::chrono::milliseconds(1000),
            "baseline note phase took " + std::to_string(baseline_phase.count() / 1000) +
                " ms, expected >= 1000 ms");
    require(outcome.report.relative_delay_reduction >= 0.40,
            "relative delay reduction " +
                std::to_string(outcome.report.relative_delay_reduction) + " < 0.40");

    auto elapsed = std::chrono::steady_clock::now() - started;
    require(elapsed < std::chrono::seconds(10), "criterion exceeded the 10 s budget");
}

/// Equal token counts per scripted call; the proposed arm's hyp/sat-phase
/// cost per iteration must be exactly half the baseline's, checked in
/// integer ledger arithmetic with zero tolerance.
void criterion_hybridity_cost() {
    Fixture fx;
    testutil::RunScriptSpec spec;
    spec.iterations = 2;
    spec.n_questions = 3;
    spec.include_proposed = true;
    spec.include_baseline = true;

    MockProvider baseline_provider(testutil::build_run_script(spec));
    MockProvider proposed_provider(testutil::build_run_script(spec));
    auto config = fx.config(3);
    Engine engine(fx.store, fx.embedder, fx.prompts, config);

    auto outcome = run_bench(engine, "acceptance query", baseline_provider, proposed_provider);
    CostLedger pricing(config.prices);

    for (int iteration = 1; iteration <= 2; ++iteration) {
        Money proposed_phase =
            role_cost_at_iteration(outcome.proposed_run, pricing, {RoleTag::HypSat}, iteration);
        Money baseline_phase = role_cost_at_iteration(
            outcome.baseline_run, pricing,
            {RoleTag::BaselineHypothesize, RoleTag::BaselineSatisfy}, iteration);
        require(proposed_phase.nanos() > 0, "proposed hyp/sat phase has no cost");
        require(proposed_phase + proposed_phase == baseline_phase,
                "iteration " + std::to_string(iteration) + ": proposed phase " +
                    proposed_phase.str() + " is not exactly half of baseline " +
                    baseline_phase.str());
    }
    require(outcome.report.relative_cost_reduction > 0.0,
            "overall relative cost reduction is not positive");
}

/// Scripted satisfied-at-iteration-3 run: exact call census.
void criterion_control_flow() {
    Fixture fx;
    MockProvider provider(
        testutil::build_run_script({.iterations = 3, .n_questions = 2}));
    Engine engine(fx.store, fx.embedder, fx.prompts, fx.config(2));

    auto report = engine.run_loop("acceptance query", provider);
    require(report.satisfied, "run should end satisfied");
    require(report.iterations_used == 3,
            "iterations_used = " + std::to_string(report.iterations_used) + ", expected 3");
    require(count_role(report, RoleTag::HypSat) == 3, "expected exactly 3 hyp-sat records");
    require(count_role(report, RoleTag::Refine) == 2, "expected exactly 2 refine records");
    require(count_role(report, RoleTag::BrainstormQuestions) == 3,
            "expected exactly 3 brainstorm-questions records");
}

/// Never-satisfied script with max_iterations = 4: capped exit, and the CLI
/// surfaces it as exit code 3.
void criterion_iteration_cap() {
    Fixture fx;
    MockProvider provider(testutil::build_run_script(
        {.iterations = 4, .satisfied_at_end = false, .n_questions = 2}));
    Engine engine(fx.store, fx.embedder, fx.prompts, fx.config(2, 4));

    auto report = engine.run_loop("acceptance query", provider);
    require(!report.satisfied, "capped run must end unsatisfied");
    require(report.iterations_used == 4, "expected 4 iterations");
    require(count_role(report, RoleTag::HypSat) == 4, "expected 4 hyp-sat records");
    require(count_role(report, RoleTag::Refine) == 3, "expected 3 refine records");

    // CLI contract: exit code 3
    testutil::TempDir dir("ragloop-acceptance");
    fx.store.save(dir.file("store.jsonl"));
    ScriptBuilder builder;
    for (const auto& step :
         testutil::build_run_script({.iterations = 4, .satisfied_at_end = false,
                                     .n_questions = 2})
             .steps) {
        builder.step(step.role_tag, step.iteration, step.response, step.slot);
    }
    auto script_path = builder.save(dir.path / "script.json");
    auto result = testutil::run_cli({"ask", "acceptance query", "--store",
                                     dir.file("store.jsonl"), "--provider", "mock",
                                     "--mock-script", script_path, "--n-questions", "2",
                                     "--max-iters", "4"});
    require(result.exit_code == 3,
            "CLI exit code " + std::to_string(result.exit_code) + ", expected 3");
}

/// search == exhaustive brute force on 200 seeded random unit vectors;
/// rerank over 20 candidates == an independent re-score-and-stable-sort.
void criterion_retrieval_oracle() {
    const std::size_t dim = 48;
    std::mt19937_64 rng(424242);

    std::vector<std::pair<std::string, Embedding>> reference;
    std::vector<DocumentChunk> chunks;
    std::vector<Embedding> embeddings;
    for (std::size_t i = 0; i < 200; ++i) {
        auto e = testutil::random_unit_vector(rng, dim);
        DocumentChunk chunk;
        chunk.chunk_id = "c:" + std::to_string(i);
        chunk.doc_id = "c";
        chunk.ordinal = static_cast<int>(i);
        chunk.text = "t" + std::to_string(i);
        chunk.span = CharSpan{0, chunk.text.size()};
        reference.emplace_back(chunk.chunk_id, e);
        chunks.push_back(std::move(chunk));
        embeddings.push_back(std::move(e));
    }
    VectorStore store(dim, "oracle-fp");
    store.add_chunks(chunks, embeddings);

    auto brute_force = [&](const std::vector<std::pair<std::string, Embedding>>& entries,
                           const Embedding& query, std::size_t k) {
        std::vector<std::pair<std::string, double>> scored;
        for (const auto& [id, emb] : entries) {
            double s = 0.0;
            for (std::size_t d = 0; d < dim; ++d) {
                s += emb.values[d] * query.values[d];
            }
            scored.emplace_back(id, s);
        }
        std::stable_sort(scored.begin(), scored.end(),
                         [](const auto& a, const auto& b) { return a.second > b.second; });
        scored.resize(std::min(scored.size(), k));
        return scored;
    };

    for (int trial = 0; trial < 25; ++trial) {
        auto query = testutil::random_unit_vector(rng, dim);
        auto hits = store.search(query, 10);
        auto expected = brute_force(reference, query, 10);
        require(hits.size() == expected.size(), "top-10 size mismatch");
        for (std::size_t i = 0; i < hits.size(); ++i) {
            require(hits[i].chunk.chunk_id == expected[i].first,
                    "search order diverges from brute force at position " + std::to_string(i));
            require(hits[i].score == expected[i].second, "search score diverges at position " +
                                                             std::to_string(i));
        }

        // rerank over 20 candidates against a fresh context vector
        auto candidates = store.search(query, 20);
        auto context = testutil::random_unit_vector(rng, dim);
        std::vector<std::pair<std::string, Embedding>> candidate_entries;
        for (const auto& hit : candidates) {
            for (const auto& [id, emb] : reference) {
                if (id == hit.chunk.chunk_id) {
                    candidate_entries.emplace_back(id, emb);
                }
            }
        }
        auto reranked = store.rerank(candidates, context, 20);
        auto rerank_expected = brute_force(candidate_entries, context, 20);
        for (std::size_t i = 0; i < reranked.size(); ++i) {
            require(reranked[i].chunk.chunk_id == rerank_expected[i].first,
                    "rerank order diverges from the oracle at position " + std::to_string(i));
        }
    }
}

/// Same script and seed, parallelism 1 / 4 / 8: byte-identical hypothesis,
/// notes, query log, and ledger token totals.
void criterion_determinism() {
    auto run_with = [](int parallelism) {
        Fixture fx;
        auto config = fx.config(4);
        config.parallelism = parallelism;
        MockProvider provider(
            testutil::build_run_script({.iterations = 2, .n_questions = 4}));
        Engine engine(fx.store, fx.embedder, fx.prompts, config);
        auto report = engine.run_loop("acceptance query", provider);
        return std::tuple{report.final_hypothesis, report.final_notes, report.query_log,
                          report.totals.total_prompt_tokens,
                          report.totals.total_completion_tokens};
    };

    auto p1 = run_with(1);
    auto p4 = run_with(4);
    auto p8 = run_with(8);
    require(p1 == p4, "parallelism 1 vs 4 outputs differ");
    require(p1 == p8, "parallelism 1 vs 8 outputs differ");
}

/// Store round-trip: 50 random queries return identical results before and
/// after save/load; bad headers are rejected.
void criterion_persistence() {
    Fixture fx;
    testutil::TempDir dir("ragloop-acceptance");
    auto path = dir.file("store.jsonl");
    fx.store.save(path);
    auto loaded = VectorStore::load(path);

    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        auto query = testutil::random_unit_vector(rng, fx.store.dim());
        auto before = fx.store.search(query, 5);
        auto after = loaded.search(query, 5);
        require(before.size() == after.size(), "result size changed after round-trip");
        for (std::size_t i = 0; i < before.size(); ++i) {
            require(before[i].chunk.chunk_id == after[i].chunk.chunk_id,
                    "result ids changed after round-trip");
            require(before[i].score == after[i].score, "scores changed after round-trip");
        }
    }

    testutil::write_file(dir.path / "bad_version.jsonl",
                         R"({"format_version":99,"dim":4,"embedder_fingerprint":"fp"})"
                         "\n");
    bool rejected = false;
    try {
        VectorStore::load(dir.file("bad_version.jsonl"));
    } catch (const StoreError&) {
        rejected = true;
    }
    require(rejected, "wrong format_version was not rejected");

    testutil::write_file(dir.path / "no_header.jsonl", "not a header\n");
    rejected = false;
    try {
        VectorStore::load(dir.file("no_header.jsonl"));
    } catch (const StoreError&) {
        rejected = true;
    }
    require(rejected, "missing header was not rejected");
}

/// Malformed-then-valid replies succeed with retries == 1; three malformed
/// replies surface as a protocol error carrying the raw text, and the CLI
/// aborts with a nonzero exit.
void criterion_json_robustness() {
    auto provider = ScriptBuilder()
                        .step(RoleTag::HypSat, 1, "not json")
                        .step(RoleTag::HypSat, 1,
                              testutil::hypsat_response("r", "h", true, ""))
                        .provider();
    ChatRequest request;
    request.role_tag = RoleTag::HypSat;
    request.system_prompt = "s";
    request.user_prompt = "u";
    request.iteration = 1;
    auto result = chat_json(provider, request);
    require(result.usage.retries == 1, "expected retries == 1 after one malformed reply");
    require(result.value["satisfied"] == true, "recovered reply should parse");

    auto exhausted = ScriptBuilder()
                         .step(RoleTag::HypSat, 1, "broken BROKEN_MARKER")
                         .step(RoleTag::HypSat, 1, "broken BROKEN_MARKER")
                         .step(RoleTag::HypSat, 1, "broken BROKEN_MARKER")
                         .provider();
    bool threw = false;
    try {
        chat_json(exhausted, request);
    } catch (const ProtocolError& e) {
        threw = true;
        require(e.raw_text.find("BROKEN_MARKER") != std::string::npos,
                "protocol error lost the raw text");
        require(e.usage.retries == 2, "expected 2 retries before giving up");
    }
    require(threw, "three malformed replies must raise a protocol error");

    // CLI-level: the run aborts cleanly with a nonzero exit and the raw text
    Fixture fx;
    testutil::TempDir dir("ragloop-acceptance");
    fx.store.save(dir.file("store.jsonl"));
    ScriptBuilder cli_script;
    cli_script.step(RoleTag::BrainstormQuestions, 1,
                    testutil::questions_response({"sub-query 1.1"}));
    cli_script.step(RoleTag::BrainstormNotes, 1, testutil::notes_response("n"), 0);
    for (int i = 0; i < 3; ++i) {
        cli_script.step(RoleTag::HypSat, 1, "broken BROKEN_MARKER");
    }
    auto script_path = cli_script.save(dir.path / "script.json");
    auto cli = testutil::run_cli({"ask", "acceptance query", "--store", dir.file("store.jsonl"),
                                  "--provider", "mock", "--mock-script", script_path,
                                  "--n-questions", "1"});
    require(cli.exit_code == 2,
            "CLI exit code " + std::to_string(cli.exit_code) + ", expected 2");
    require(cli.err.find("BROKEN_MARKER") != std::string::npos,
            "CLI did not surface the raw model output");
}

/// The reference comparison rendered from fixture values: columns intact,
/// reductions within 0.01 percentage points of 32.64% and 58%.
void criterion_report_fidelity() {
    BenchRow baseline{"baseline", true, Money::parse("0.00527"),
                      std::chrono::microseconds(24'310'000)};
    BenchRow proposed{"proposed", true, Money::parse("0.00355"),
                      std::chrono::microseconds(10'210'000)};
    auto report = make_bench_report("fixture query", baseline, proposed);

    double cost_pct = report.relative_cost_reduction * 100.0;
    double delay_pct = report.relative_delay_reduction * 100.0;
    require(std::abs(cost_pct - 32.64) <= 0.01,
            "cost reduction " + std::to_string(cost_pct) + "% not within 0.01 pp of 32.64%");
    require(std::abs(delay_pct - 58.0) <= 0.01,
            "delay reduction " + std::to_string(delay_pct) + "% not within 0.01 pp of 58%");

    auto table = render_bench_table(report);
    for (const char* needle :
         {"Method", "Information Need", "Cost ($)", "Delay (seconds)", "0.00527", "0.00355",
          "24.31", "10.21", "satisfied"}) {
        require(table.find(needle) != std::string::npos,
                std::string("rendered table is missing '") + needle + "'");
    }

    auto j = report.to_json();
    require(j["rows"][0]["cost_usd"] == "0.00527", "fixture cost cell mismatch in JSON");
    require(j["rows"][1]["cost_usd"] == "0.00355", "fixture cost cell mismatch in JSON");
}

struct Criterion {
    int id;
    std::string title;
    std::function<void()> body;
};

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "concurrency speedup analogue (delay reduction >= 0.40; note phase < 450 ms vs >= 1000 ms)",
         criterion_concurrency_speedup},
        {2, "hybridity cost analogue (per-iteration hyp/sat cost exactly halved)",
         criterion_hybridity_cost},
        {3, "control flow (satisfied at iteration 3: 3 hyp-sat, 2 refine, 3 question calls)",
         criterion_control_flow},
        {4, "iteration cap (4 passes, 3 refines, CLI exit 3)", criterion_iteration_cap},
        {5, "retrieval oracle (search == brute force; rerank == re-score oracle)",
         criterion_retrieval_oracle},
        {6, "determinism and concurrency-invariance (parallelism 1/4/8)",
         criterion_determinism},
        {7, "persistence round-trip (50 queries identical; bad headers rejected)",
         criterion_persistence},
        {8, "JSON robustness (retry once then succeed; exhaustion aborts cleanly)",
         criterion_json_robustness},
        {9, "report fidelity (reference fixture: 32.64% and 58% within 0.01 pp)",
         criterion_report_fidelity},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        try {
            criterion.body();
            std::printf("PASS  criterion %d: %s\n", criterion.id, criterion.title.c_str());
        } catch (const std::exception& e) {
            ++failures;
            std::printf("FAIL  criterion %d: %s\n      %s\n", criterion.id,
                        criterion.title.c_str(), e.what());
        }
        std::fflush(stdout);
    }

    if (failures > 0) {
        std::printf("%d of %zu criteria failed\n", failures, criteria.size());
        return 1;
    }
    std::printf("all %zu criteria passed\n", criteria.size());
    return 0;
}
