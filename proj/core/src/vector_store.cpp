#include "ragloop/vector_store.hpp"

#include "ragloop/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_set>

namespace ragloop {

using nlohmann::json;

namespace {

constexpr double kNormTolerance = 1e-9;

std::vector<SearchHit> take_top(std::vector<SearchHit> scored, std::size_t k) {
    // Stable: ties keep the pre-sort (insertion / original) order.
    std::stable_sort(scored.begin(), scored.end(),
                     [](const SearchHit& a, const SearchHit& b) { return a.score > b.score; });
    if (scored.size() > k) {
        scored.resize(k);
    }
    for (std::size_t i = 0; i < scored.size(); ++i) {
        scored[i].rank = static_cast<int>(i) + 1;
    }
    return scored;
}

} // namespace

VectorStore::VectorStore(std::size_t dim, std::string embedder_fingerprint)
    : dim_(dim), fingerprint_(std::move(embedder_fingerprint)) {
    if (dim_ == 0) {
        throw ConfigError("vector store dim must be positive");
    }
}

void VectorStore::add_chunks(const std::vector<DocumentChunk>& chunks,
                             const std::vector<Embedding>& embeddings) {
    if (chunks.size() != embeddings.size()) {
        throw ConfigError("add_chunks: " + std::to_string(chunks.size()) + " chunks vs " +
                          std::to_string(embeddings.size()) + " embeddings");
    }
    std::unordered_set<std::string> batch_ids;
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        if (embeddings[i].dim() != dim_) {
            throw StoreError("dimension mismatch for chunk '" + chunks[i].chunk_id + "': got " +
                             std::to_string(embeddings[i].dim()) + ", store has " +
                             std::to_string(dim_));
        }
        if (std::abs(l2_norm(embeddings[i]) - 1.0) > kNormTolerance) {
            throw StoreError("embedding for chunk '" + chunks[i].chunk_id +
                             "' is not L2-normalized");
        }
        if (index_by_id_.count(chunks[i].chunk_id) > 0 ||
            !batch_ids.insert(chunks[i].chunk_id).second) {
            throw StoreError("duplicate chunk_id: " + chunks[i].chunk_id);
        }
    }
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        index_by_id_.emplace(chunks[i].chunk_id, entries_.size());
        entries_.emplace_back(chunks[i], embeddings[i]);
    }
}

std::vector<SearchHit> VectorStore::search(const Embedding& query, std::size_t k) const {
    if (k < 1) {
        throw ConfigError("search: k must be >= 1");
    }
    if (entries_.empty()) {
        throw StoreError("empty store");
    }
    if (query.dim() != dim_) {
        throw StoreError("query dimension " + std::to_string(query.dim()) +
                         " does not match store dimension " + std::to_string(dim_));
    }

    std::vector<SearchHit> scored;
    scored.reserve(entries_.size());
    for (const auto& [chunk, emb] : entries_) {
        scored.push_back(SearchHit{chunk, dot(query, emb), 0});
    }
    return take_top(std::move(scored), k);
}

std::vector<SearchHit> VectorStore::rerank(const std::vector<SearchHit>& hits,
                                           const Embedding& context,
                                           std::size_t k) const {
    if (k < 1) {
        throw ConfigError("rerank: k must be >= 1");
    }
    if (hits.empty()) {
        throw InvalidInput("rerank: empty candidate list");
    }
    if (k > hits.size()) {
        throw ConfigError("rerank: k (" + std::to_string(k) + ") exceeds candidate count (" +
                          std::to_string(hits.size()) + ")");
    }

    std::vector<SearchHit> rescored;
    rescored.reserve(hits.size());
    for (const auto& hit : hits) {
        auto it = index_by_id_.find(hit.chunk.chunk_id);
        if (it == index_by_id_.end()) {
            throw StoreError("rerank: chunk '" + hit.chunk.chunk_id + "' is not in this store");
        }
        rescored.push_back(SearchHit{hit.chunk, dot(context, entries_[it->second].second), 0});
    }
    return take_top(std::move(rescored), k);
}

std::size_t VectorStore::document_count() const {
    std::unordered_set<std::string> docs;
    for (const auto& [chunk, emb] : entries_) {
        docs.insert(chunk.doc_id);
    }
    return docs.size();
}

void VectorStore::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw StoreError("cannot open store file for writing: " + path);
    }

    json header = {{"format_version", kFormatVersion},
                   {"dim", dim_},
                   {"embedder_fingerprint", fingerprint_}};
    out << header.dump() << "\n";

    for (const auto& [chunk, emb] : entries_) {
        json record = {{"chunk_id", chunk.chunk_id},
                       {"doc_id", chunk.doc_id},
                       {"ordinal", chunk.ordinal},
                       {"text", chunk.text},
                       {"char_span", json::array({chunk.span.start, chunk.span.end})},
                       {"values", emb.values}};
        out << record.dump() << "\n";
    }
    if (!out) {
        throw StoreError("write failed: " + path);
    }
}

VectorStore VectorStore::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw StoreError("cannot open store file: " + path);
    }

    std::string line;
    if (!std::getline(in, line)) {
        throw StoreError("store file is empty: " + path);
    }

    json header = json::parse(line, nullptr, false);
    if (header.is_discarded() || !header.is_object() || !header.contains("format_version") ||
        !header.contains("dim") || !header.contains("embedder_fingerprint")) {
        throw StoreError("corrupted record at line 1: bad header in " + path);
    }
    if (!header["format_version"].is_number_integer() ||
        header["format_version"].get<int>() != kFormatVersion) {
        throw StoreError("unsupported store format_version " + header["format_version"].dump() +
                         " (expected " + std::to_string(kFormatVersion) + ") in " + path);
    }

    VectorStore store(header["dim"].get<std::size_t>(),
                      header["embedder_fingerprint"].get<std::string>());

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue; // tolerate a trailing newline
        }
        json record = json::parse(line, nullptr, false);
        if (record.is_discarded() || !record.is_object()) {
            throw StoreError("corrupted record at line " + std::to_string(line_no) + " in " +
                             path);
        }
        try {
            DocumentChunk chunk;
            chunk.chunk_id = record.at("chunk_id").get<std::string>();
            chunk.doc_id = record.at("doc_id").get<std::string>();
            chunk.ordinal = record.at("ordinal").get<int>();
            chunk.text = record.at("text").get<std::string>();
            const auto& span = record.at("char_span");
            chunk.span = CharSpan{span.at(0).get<std::size_t>(), span.at(1).get<std::size_t>()};
            Embedding emb;
            emb.values = record.at("values").get<std::vector<double>>();
            store.add_chunks({chunk}, {emb});
        } catch (const json::exception& e) {
            throw StoreError("corrupted record at line " + std::to_string(line_no) + " in " +
                             path + ": " + e.what());
        }
    }
    return store;
}

} // namespace ragloop
