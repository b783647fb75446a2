// Latency profile of the brainstorm fan-out: the same scripted workload
// (8 note tasks, 20 ms simulated latency each) at increasing parallelism.
// Wall time should fall roughly as tasks/parallelism * latency.

#include <benchmark/benchmark.h>

#include "ragloop/mock_provider.hpp"
#include "ragloop/prompts.hpp"
#include "ragloop/stages.hpp"
#include "ragloop/vector_store.hpp"

#include <string>
#include <vector>

namespace {

using namespace ragloop;

constexpr int kTasks = 8;
constexpr int kLatencyMs = 20;

MockScript fanout_script() {
    MockScript script;
    std::vector<std::string> questions;
    for (int i = 0; i < kTasks; ++i) {
        questions.push_back("question " + std::to_string(i));
    }
    MockStep proposal;
    proposal.role_tag = RoleTag::BrainstormQuestions;
    proposal.iteration = 1;
    proposal.response = nlohmann::json{{"questions", questions}}.dump();
    script.steps.push_back(proposal);

    for (int i = 0; i < kTasks; ++i) {
        MockStep note;
        note.role_tag = RoleTag::BrainstormNotes;
        note.iteration = 1;
        note.slot = i;
        note.response = nlohmann::json{{"notes", "note " + std::to_string(i)}}.dump();
        note.latency = std::chrono::milliseconds(kLatencyMs);
        script.steps.push_back(note);
    }
    return script;
}

struct FanoutState {
    LocalHashEmbedder embedder{64, 1};
    VectorStore store;
    PromptLibrary prompts = PromptLibrary::builtin();
    QueryLog log;

    FanoutState() : store(64, embedder.fingerprint()) {
        std::vector<DocumentChunk> chunks;
        std::vector<Embedding> embeddings;
        for (int i = 0; i < 32; ++i) {
            DocumentChunk chunk;
            chunk.doc_id = "b.txt";
            chunk.ordinal = i;
            chunk.chunk_id = "b.txt:" + std::to_string(i);
            chunk.text = "benchmark passage number " + std::to_string(i * 31);
            chunk.span = CharSpan{0, chunk.text.size()};
            embeddings.push_back(embedder.embed(chunk.text));
            chunks.push_back(std::move(chunk));
        }
        store.add_chunks(chunks, embeddings);
    }
};

void BM_BrainstormFanout(benchmark::State& state) {
    FanoutState fx;
    const MockScript script = fanout_script();

    for (auto _ : state) {
        MockProvider provider(script);
        CostLedger ledger(PriceTable::parse("0.001", "0.002"));

        BrainstormRequest request;
        request.user_query = "benchmark query";
        request.query_log = &fx.log;
        request.store = &fx.store;
        request.embedder = &fx.embedder;
        request.prompts = &fx.prompts;
        request.n_questions = kTasks;
        request.k = 2;
        request.parallelism = static_cast<int>(state.range(0));
        request.iteration = 1;

        auto outcome = brainstorm_concurrent(request, provider, ledger);
        benchmark::DoNotOptimize(outcome);
    }
    state.SetItemsProcessed(state.iterations() * kTasks);
}
BENCHMARK(BM_BrainstormFanout)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->UseRealTime()
    ->Unit(benchmark::kMillisecond);

} // namespace
