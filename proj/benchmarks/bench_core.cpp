#include <benchmark/benchmark.h>

#include "ragloop/embedding.hpp"
#include "ragloop/ingest.hpp"
#include "ragloop/vector_store.hpp"

#include <map>
#include <random>
#include <string>

namespace {

using namespace ragloop;

std::string synthetic_text(std::size_t length, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> letter('a', 'z');
    std::string text;
    text.reserve(length);
    for (std::size_t i = 0; i < length; ++i) {
        text += (i % 7 == 6) ? ' ' : static_cast<char>(letter(rng));
    }
    return text;
}

const VectorStore& store_with(std::size_t entries) {
    static std::map<std::size_t, VectorStore> cache;
    auto it = cache.find(entries);
    if (it == cache.end()) {
        LocalHashEmbedder embedder(256, 1);
        std::vector<DocumentChunk> chunks;
        std::vector<Embedding> embeddings;
        for (std::size_t i = 0; i < entries; ++i) {
            DocumentChunk chunk;
            chunk.doc_id = "bench.txt";
            chunk.ordinal = static_cast<int>(i);
            chunk.chunk_id = "bench.txt:" + std::to_string(i);
            chunk.text = synthetic_text(200, static_cast<unsigned>(i));
            chunk.span = CharSpan{0, chunk.text.size()};
            embeddings.push_back(embedder.embed(chunk.text));
            chunks.push_back(std::move(chunk));
        }
        VectorStore store(256, embedder.fingerprint());
        store.add_chunks(chunks, embeddings);
        it = cache.emplace(entries, std::move(store)).first;
    }
    return it->second;
}

void BM_ChunkDocument(benchmark::State& state) {
    RawDocument doc{"bench.txt", synthetic_text(static_cast<std::size_t>(state.range(0)), 3),
                    "bench.txt"};
    for (auto _ : state) {
        auto chunks = chunk_document(doc, 1000, 200);
        benchmark::DoNotOptimize(chunks);
    }
    state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ChunkDocument)->Arg(10'000)->Arg(100'000);

void BM_LocalEmbed(benchmark::State& state) {
    LocalHashEmbedder embedder(static_cast<std::size_t>(state.range(0)), 1);
    std::string text = synthetic_text(1000, 9);
    for (auto _ : state) {
        auto embedding = embedder.embed(text);
        benchmark::DoNotOptimize(embedding);
    }
    state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_LocalEmbed)->Arg(256)->Arg(4096);

void BM_StoreSearch(benchmark::State& state) {
    const auto& store = store_with(static_cast<std::size_t>(state.range(0)));
    LocalHashEmbedder embedder(256, 1);
    auto query = embedder.embed(synthetic_text(120, 77));
    for (auto _ : state) {
        auto hits = store.search(query, 10);
        benchmark::DoNotOptimize(hits);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_StoreSearch)->Arg(1'000)->Arg(10'000);

void BM_Rerank(benchmark::State& state) {
    const auto& store = store_with(1'000);
    LocalHashEmbedder embedder(256, 1);
    auto query = embedder.embed(synthetic_text(120, 77));
    auto context = embedder.embed(synthetic_text(400, 78));
    auto hits = store.search(query, 20);
    for (auto _ : state) {
        auto reranked = store.rerank(hits, context, 5);
        benchmark::DoNotOptimize(reranked);
    }
}
BENCHMARK(BM_Rerank);

} // namespace
