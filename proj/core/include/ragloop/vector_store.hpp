#pragma once

#include "ragloop/embedding.hpp"
#include "ragloop/ingest.hpp"

#include <cstddef>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace ragloop {

/// One retrieval candidate. Hits are sorted by score descending, ties kept
/// in insertion order, ranks consecutive from 1.
struct SearchHit {
    DocumentChunk chunk;
    double score = 0.0; // cosine similarity in [-1, 1]
    int rank = 0;
};

/// Embedded exact-scan vector index over document chunks.
///
/// Search is a brute-force cosine top-k — intentionally, so retrieval is
/// oracle-checkable; no approximation anywhere. Reads (search / rerank) are
/// safe concurrently; writes need exclusive access and happen before any
/// concurrent reads begin.
class VectorStore {
public:
    using Entry = std::pair<DocumentChunk, Embedding>;

    VectorStore(std::size_t dim, std::string embedder_fingerprint);

    /// Appends chunks in input order. Rejects length mismatches, wrong
    /// dimensions, non-normalized vectors, and duplicate chunk ids.
    void add_chunks(const std::vector<DocumentChunk>& chunks,
                    const std::vector<Embedding>& embeddings);

    /// Exact top-min(k, size) by cosine similarity, stable on ties.
    std::vector<SearchHit> search(const Embedding& query, std::size_t k) const;

    /// Re-scores `hits` against `context` (the composite query+notes
    /// embedding built by the caller), stable-sorts, truncates to k, and
    /// reassigns ranks. Requires k >= 1 and k <= hits.size().
    std::vector<SearchHit> rerank(const std::vector<SearchHit>& hits,
                                  const Embedding& context,
                                  std::size_t k) const;

    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    std::size_t dim() const { return dim_; }
    const std::string& fingerprint() const { return fingerprint_; }
    const std::vector<Entry>& entries() const { return entries_; }

    std::size_t document_count() const;

    /// Newline-delimited JSON: header line {format_version, dim,
    /// embedder_fingerprint}, then one record per entry. Vector values
    /// round-trip exactly (shortest-exact decimal serialization).
    void save(const std::string& path) const;
    static VectorStore load(const std::string& path);

    static constexpr int kFormatVersion = 1;

private:
    std::size_t dim_;
    std::string fingerprint_;
    std::vector<Entry> entries_;
    std::unordered_map<std::string, std::size_t> index_by_id_;
};

} // namespace ragloop
